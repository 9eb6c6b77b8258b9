#include "qkalman/symplectic.hpp"

#include <stdexcept>

namespace qkalman {

namespace {

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd j_form(Eigen::Index k) {
  if (k < 0) throw std::invalid_argument("j_form: negative size");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  j.topRightCorner(k, k).setIdentity();
  j.bottomLeftCorner(k, k) = -Eigen::MatrixXd::Identity(k, k);
  return j;
}

Eigen::MatrixXd sharp_adjoint(const Eigen::MatrixXd& x) {
  if (x.rows() % 2 != 0 || x.cols() % 2 != 0)
    throw std::invalid_argument("sharp_adjoint: both dimensions must be even");
  const Eigen::Index k = x.rows() / 2;
  const Eigen::Index r = x.cols() / 2;
  return -j_form(r) * x.transpose() * j_form(k);
}

Eigen::MatrixXd tilde_delta(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& n) {
  if (m.rows() != n.rows() || m.cols() != n.cols())
    throw std::invalid_argument("tilde_delta: arguments must have equal shape");
  Eigen::MatrixXd out(2 * m.rows(), 2 * m.cols());
  out.topLeftCorner(m.rows(), m.cols()) = (m + n).real();
  out.topRightCorner(m.rows(), m.cols()) = -(m - n).imag();
  out.bottomLeftCorner(m.rows(), m.cols()) = (m + n).imag();
  out.bottomRightCorner(m.rows(), m.cols()) = (m - n).real();
  return out;
}

HamiltonianCheck is_hamiltonian(const Eigen::MatrixXd& m, const Eigen::MatrixXd& j,
                                double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("is_hamiltonian: matrix must be square");
  if (j.rows() != m.rows() || j.cols() != m.cols())
    throw std::invalid_argument("is_hamiltonian: form does not match matrix shape");
  HamiltonianCheck out;
  const Eigen::MatrixXd jm = j * m;
  out.residual = max_abs(jm - jm.transpose());
  out.hamiltonian = out.residual <= tol;
  const Eigen::MatrixXd jm2 = j * (m * m);
  out.square_residual = max_abs(jm2 + jm2.transpose());
  out.square_skew_hamiltonian = out.square_residual <= tol;
  return out;
}

}  // namespace qkalman
