#include "qkalman/gramians.hpp"

#include <stdexcept>

#include <Eigen/SVD>

#include "qkalman/numerics.hpp"
#include "qkalman/symplectic.hpp"

namespace qkalman {

namespace {

Eigen::MatrixXd free_flow_generator(const SLHModel& model) {
  return j_form(model.n) * model.hamiltonian;
}

void check_horizon(double t, double s) {
  if (!(t < s))
    throw std::invalid_argument("gramian horizon must satisfy t < s");
}

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd controllability_gramian(const QuadratureSystem& sys,
                                        const SLHModel& model, double t, double s) {
  check_horizon(t, s);
  const Eigen::MatrixXd gen = free_flow_generator(model);
  return van_loan_gramian(-gen, sys.b * sys.b.transpose(), s - t);
}

Eigen::MatrixXd observability_gramian(const QuadratureSystem& sys,
                                      const SLHModel& model, double t, double s) {
  check_horizon(t, s);
  const Eigen::MatrixXd gen = free_flow_generator(model);
  return van_loan_gramian(gen.transpose(), sys.c.transpose() * sys.c, s - t);
}

GramianPair compute_gramians(const QuadratureSystem& sys, const SLHModel& model,
                             double t, double s) {
  GramianPair pair;
  pair.wo = observability_gramian(sys, model, t, s);
  pair.wc = controllability_gramian(sys, model, t, s);
  pair.t = t;
  pair.s = s;
  return pair;
}

StructuredKalmanMatrices structured_matrices(const QuadratureSystem& sys,
                                             const SLHModel& model) {
  const Eigen::Index n = model.n;
  const Eigen::Index mm = 2 * model.m;
  const Eigen::MatrixXd gen = free_flow_generator(model);

  StructuredKalmanMatrices out;
  out.os.resize(2 * n * mm, 2 * n);
  out.cs.resize(2 * n, 2 * n * mm);
  Eigen::MatrixXd crow = sys.c;  // C (JH)^k
  Eigen::MatrixXd bcol = sys.b;  // (JH)^k B
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    out.os.middleRows(k * mm, mm) = crow;
    out.cs.middleCols(k * mm, mm) = bcol;
    if (k + 1 < 2 * n) {
      crow = crow * gen;
      bcol = gen * bcol;
    }
  }
  return out;
}

DualityReport verify_duality(const GramianPair& pair, const ToleranceConfig& cfg) {
  cfg.validate();
  if (pair.wo.rows() != pair.wc.rows() || pair.wo.cols() != pair.wc.cols())
    throw std::invalid_argument("verify_duality: Gramian shapes differ");
  const Eigen::MatrixXd j = j_form(pair.wo.rows() / 2);
  DualityReport out;
  out.residual = max_abs(pair.wo - j.transpose() * pair.wc * j);
  out.rank_wo = svd_rank(pair.wo, cfg);
  out.rank_wc = svd_rank(pair.wc, cfg);
  out.pass = out.residual <= cfg.residual_tol && out.rank_wo == out.rank_wc;
  return out;
}

HorizonIndependenceReport verify_horizon_independence(
    const QuadratureSystem& sys, const SLHModel& model,
    const std::vector<std::pair<double, double>>& horizons, const ToleranceConfig& cfg,
    double angle_tol) {
  cfg.validate();
  if (horizons.empty())
    throw std::invalid_argument("verify_horizon_independence: no horizons given");

  HorizonIndependenceReport out;
  std::vector<Eigen::MatrixXd> kernels;
  for (const auto& [t, s] : horizons) {
    const Eigen::MatrixXd wo = observability_gramian(sys, model, t, s);
    NullSpaceResult ns = null_space(wo, cfg);
    out.ranks.push_back(ns.rank);
    kernels.push_back(ns.basis);
  }

  bool ranks_equal = true;
  for (const auto r : out.ranks) ranks_equal = ranks_equal && r == out.ranks.front();

  out.max_kernel_angle = 0.0;
  if (ranks_equal) {
    for (size_t i = 0; i + 1 < kernels.size(); ++i)
      for (size_t k = i + 1; k < kernels.size(); ++k)
        out.max_kernel_angle =
            std::max(out.max_kernel_angle, max_principal_angle(kernels[i], kernels[k]));
  }
  out.pass = ranks_equal && out.max_kernel_angle <= angle_tol;
  return out;
}

Horizon effective_horizon(const SLHModel& model, double t, double s) {
  check_horizon(t, s);
  Horizon out;
  out.t = t;
  out.s = s;
  const Eigen::MatrixXd gen = j_form(model.n) * model.hamiltonian;
  if (gen.size() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gen);
  const double norm = svd.singularValues()(0);
  if (norm * (s - t) > 50.0) {
    out.s = t + 50.0 / norm;
    out.shrunk = true;
  }
  return out;
}

}  // namespace qkalman
