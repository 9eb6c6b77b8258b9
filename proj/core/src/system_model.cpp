#include "qkalman/system_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "qkalman/symplectic.hpp"

namespace qkalman {

namespace {

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

SLHModel make_model(Eigen::MatrixXd hamiltonian, Eigen::MatrixXcd coupling,
                    double symmetry_tol) {
  if (hamiltonian.rows() != hamiltonian.cols())
    throw std::invalid_argument("make_model: hamiltonian must be square");
  if (hamiltonian.rows() % 2 != 0)
    throw std::invalid_argument("make_model: hamiltonian dimension must be even");
  const Eigen::Index n = hamiltonian.rows() / 2;
  if (n == 0) throw std::invalid_argument("make_model: at least one mode required");
  if (coupling.cols() != 2 * n)
    throw std::invalid_argument("make_model: coupling must have 2n columns");

  const double asym = max_abs(hamiltonian - hamiltonian.transpose());
  if (asym > symmetry_tol)
    throw std::invalid_argument("make_model: hamiltonian asymmetry " +
                                std::to_string(asym) + " exceeds tolerance");

  SLHModel model;
  model.n = n;
  model.m = coupling.rows();
  model.hamiltonian = 0.5 * (hamiltonian + hamiltonian.transpose());
  model.coupling = std::move(coupling);
  return model;
}

QuadratureSystem build_quadrature(const SLHModel& model, double symmetry_tol) {
  const Eigen::Index n = model.n;
  const Eigen::Index m = model.m;
  if (model.hamiltonian.rows() != 2 * n || model.hamiltonian.cols() != 2 * n)
    throw std::invalid_argument("build_quadrature: hamiltonian shape mismatch");
  if (model.coupling.rows() != m || model.coupling.cols() != 2 * n)
    throw std::invalid_argument("build_quadrature: coupling shape mismatch");
  if (max_abs(model.hamiltonian - model.hamiltonian.transpose()) > symmetry_tol)
    throw std::invalid_argument("build_quadrature: hamiltonian must be symmetric");

  QuadratureSystem sys;
  sys.n = n;
  sys.m = m;
  sys.c.resize(2 * m, 2 * n);
  sys.c.topRows(m) = model.coupling.real();
  sys.c.bottomRows(m) = model.coupling.imag();
  sys.c *= std::numbers::sqrt2;
  sys.b = -sharp_adjoint(sys.c);
  sys.a = j_form(n) * model.hamiltonian - 0.5 * sharp_adjoint(sys.c) * sys.c;
  sys.d = Eigen::MatrixXd::Identity(2 * m, 2 * m);
  return sys;
}

RealizabilityReport check_physical_realizability(const QuadratureSystem& sys,
                                                 double tol) {
  RealizabilityReport out;
  out.residual_state =
      max_abs(sys.a + sharp_adjoint(sys.a) + sys.b * sharp_adjoint(sys.b));
  out.residual_io = max_abs(sys.b + sharp_adjoint(sys.c) * sharp_adjoint(sys.d));
  out.pass = out.residual_state <= tol && out.residual_io <= tol;
  return out;
}

CommutationReport check_commutation_preserving(const Eigen::MatrixXd& t,
                                               const Eigen::MatrixXd& j_target,
                                               double tol) {
  if (t.rows() % 2 != 0)
    throw std::invalid_argument("check_commutation_preserving: ambient dimension must be even");
  if (j_target.rows() != t.cols() || j_target.cols() != t.cols())
    throw std::invalid_argument("check_commutation_preserving: target form shape mismatch");
  CommutationReport out;
  out.residual = max_abs(t.transpose() * j_form(t.rows() / 2) * t - j_target);
  out.pass = out.residual <= tol;
  return out;
}

}  // namespace qkalman
