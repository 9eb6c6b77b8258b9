#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qkalman/gramians.hpp"
#include "qkalman/subspaces.hpp"
#include "qkalman/system_model.hpp"
#include "qkalman/tolerance.hpp"

namespace qkalman {

// Completes a J-invariant subspace basis (2n x 2k, orthonormal) to the form
// [V | J^T V]: orthonormal, and symplectic in the sense block^T J_n block = J_k.
// Pair vectors are drawn deterministically: standard basis vectors are
// projected onto the remaining subspace in index order and the first residual
// with norm > tol seeds the next pair. Throws when the span is not J-invariant
// within tol or the construction cannot be completed (odd or misclassified
// subspace dimension).
Eigen::MatrixXd symplectic_pair_basis(const Eigen::MatrixXd& subspace_basis,
                                      double tol = 1e-8);

// Column order of the transformed coordinates.
//   T:      [cobar | co | cbarobar | cbaro], the Gramian-pattern order;
//   Ttilde: [cobar | cbaro | co | cbarobar], pairs the two mixed blocks into
//           one symplectic unit ("h" block) so the commutation form becomes
//           blkdiag(J_n3, J_n1, J_n2).
enum class BlockOrdering { T, Ttilde };

struct TransformationParts {
  Eigen::MatrixXd t_cobar;     // 2n x n3
  Eigen::MatrixXd t_co;        // 2n x 2n1
  Eigen::MatrixXd t_cbarobar;  // 2n x 2n2
  Eigen::MatrixXd t_cbaro;     // 2n x n3
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  Eigen::Index n3 = 0;

  Eigen::MatrixXd t() const;
  Eigen::MatrixXd t_tilde() const;
  Eigen::MatrixXd t_h() const;  // [cobar | cbaro], 2n x 2n3
};

// T_co and T_cbarobar through the pair construction, T_cbaro = J^T T_cobar.
TransformationParts build_transformation(const KalmanSubspaces& subs, double tol = 1e-8);

struct DecompositionDiagnostics {
  double orthogonality = 0.0;     // max|T^T T - I| over both orderings
  double block_symplectic = 0.0;  // max|Ttilde^T J Ttilde - blkdiag(J_n3,J_n1,J_n2)|
  std::vector<std::string> warnings;
};

// Transformed model. a_bar/b_bar/c_bar/h_bar/lambda_bar are stated in the
// requested ordering; the named blocks always refer to the Ttilde arrangement
// (h block first), and the "clean" copies have entries at or below
// cfg.residual_tol zeroed.
struct KalmanDecomposition {
  TransformationParts parts;
  BlockOrdering ordering = BlockOrdering::Ttilde;
  Eigen::MatrixXd t;        // 2n x 2n, T ordering
  Eigen::MatrixXd t_tilde;  // 2n x 2n, Ttilde ordering

  Eigen::MatrixXd a_bar_raw, a_bar_clean;
  Eigen::MatrixXd b_bar_raw, b_bar_clean;
  Eigen::MatrixXd c_bar_raw, c_bar_clean;
  Eigen::MatrixXd h_bar;      // transformed Hamiltonian matrix
  Eigen::MatrixXcd lambda_bar;  // transformed coupling, m x 2n

  // h block (the symplectically paired mixed modes), 2n3 x 2n3:
  //   a_h = [[a_h11, a_h12], [0, a_h22]] in (cobar, cbaro) coordinates.
  Eigen::MatrixXd a_h, a_h11, a_h12, a_h22;
  Eigen::MatrixXd a_co;        // 2n1 x 2n1
  Eigen::MatrixXd a_cbarobar;  // 2n2 x 2n2
  Eigen::MatrixXd a_12, a_13;  // cobar rows coupling into co / cbarobar
  Eigen::MatrixXd a_24, a_34;  // co / cbarobar rows coupling into cbaro
  Eigen::MatrixXd b_h;  // 2n3 x 2m; rows in the cbaro half vanish structurally
  Eigen::MatrixXd b_co;  // 2n1 x 2m
  Eigen::MatrixXd c_co;  // 2m x 2n1
  Eigen::MatrixXd c_h;   // 2m x 2n3; columns in the cobar half vanish structurally

  DecompositionDiagnostics diagnostics;
};

KalmanDecomposition apply_transformation(const QuadratureSystem& sys,
                                         const SLHModel& model,
                                         const TransformationParts& parts,
                                         BlockOrdering ordering = BlockOrdering::Ttilde,
                                         const ToleranceConfig& cfg = {});

struct StructureReport {
  // max-abs entry over all block positions the canonical form requires to
  // vanish in A_bar, B_bar, C_bar (T ordering).
  double structural_zeros = 0.0;
  // T^T W_c T supported on the leading (cobar|co) corner, T^T W_o T on the
  // (co|cbaro) entries.
  double gramian_pattern = 0.0;
  // a_h and a_cbarobar generate flows preserving J_n3 / J_n2.
  double hamiltonian_residual = 0.0;
  bool hamiltonian_pass = false;
  // Invariance of the subspace chain under the original A, B, C.
  double invariance_residual = 0.0;
  bool pass = false;
};

StructureReport verify_canonical_structure(const KalmanDecomposition& dec,
                                           const QuadratureSystem& sys,
                                           const GramianPair& gram, double tol = 1e-8);

struct Subsystems {
  Eigen::MatrixXd a_co, b_co, c_co;      // the transfer-function-carrying part
  Eigen::MatrixXd a_h, b_h, c_h;         // mixed pairs, noise-driven but silent
  Eigen::MatrixXd a_cbarobar;            // decoupled internal dynamics
};

// Requires a passing structure report; throws std::runtime_error otherwise.
Subsystems extract_subsystems(const KalmanDecomposition& dec,
                              const StructureReport& structure);

struct TransferInvarianceReport {
  double max_mismatch = 0.0;
  bool pass = false;
};

// C (sI - A)^{-1} B against the co-subsystem reduction at the given sample
// points. Throws when a sample point hits the spectrum of either matrix.
TransferInvarianceReport transfer_function_invariance(
    const QuadratureSystem& sys, const KalmanDecomposition& dec,
    const std::vector<std::complex<double>>& sample_points, double tol = 1e-9);

// Sample points i*y on the imaginary axis, skipping any y closer than 1e-3 to
// an eigenvalue frequency of a or a_co.
std::vector<std::complex<double>> default_sample_points(const Eigen::MatrixXd& a,
                                                        const Eigen::MatrixXd& a_co,
                                                        Eigen::Index count = 10);

struct ChangedBasis {
  Eigen::MatrixXd t_combined;  // original coordinates -> new coordinates, as columns
  Eigen::MatrixXd a, b, c, h;
  Eigen::MatrixXcd lambda;
};

// Further orthogonal change of basis x_new = t_extra * x_bar on top of the
// decomposition's active ordering. Throws when t_extra is not orthogonal
// within tol.
ChangedBasis change_basis(const KalmanDecomposition& dec, const Eigen::MatrixXd& t_extra,
                          double tol = 1e-9);

}  // namespace qkalman
