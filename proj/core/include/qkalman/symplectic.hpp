#pragma once

#include <Eigen/Core>

namespace qkalman {

// J_k = [[0, I_k], [-I_k, 0]], the symplectic form in (q_1..q_k, p_1..p_k)
// coordinate ordering. J_k^T = J_k^{-1} = -J_k.
Eigen::MatrixXd j_form(Eigen::Index k);

// X^# = -J_r X^T J_k for real X of shape 2k x 2r. Satisfies (X^#)^# = X and
// (X Y)^# = Y^# X^#. Throws std::invalid_argument on odd dimensions.
Eigen::MatrixXd sharp_adjoint(const Eigen::MatrixXd& x);

// Real image [[Re(M+N), -Im(M-N)], [Im(M+N), Re(M-N)]] of a complex pair of
// equal shape. The image set is closed under sums, products and sharp
// adjoints; the product obeys
//   tilde_delta(M1,N1) * tilde_delta(M2,N2)
//     == tilde_delta(M1 M2 + N1 conj(N2), M1 N2 + N1 conj(M2)).
Eigen::MatrixXd tilde_delta(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& n);

struct HamiltonianCheck {
  bool hamiltonian = false;  // max|JM - (JM)^T| <= tol
  double residual = 0.0;
  bool square_skew_hamiltonian = false;  // max|J M^2 + (J M^2)^T| <= tol
  double square_residual = 0.0;
};

// Symmetry test of J*M (M generates a flow preserving the form J) together
// with the complementary skew-symmetry test of J*M^2. Throws on shape
// mismatch between m and j.
HamiltonianCheck is_hamiltonian(const Eigen::MatrixXd& m, const Eigen::MatrixXd& j,
                                double tol);

}  // namespace qkalman
