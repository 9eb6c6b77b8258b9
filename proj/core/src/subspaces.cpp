#include "qkalman/subspaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qkalman/numerics.hpp"
#include "qkalman/symplectic.hpp"

namespace qkalman {

namespace {

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd projector(const Eigen::MatrixXd& basis, Eigen::Index dim) {
  if (basis.cols() == 0) return Eigen::MatrixXd::Zero(dim, dim);
  return basis * basis.transpose();
}

// Kernel of I + K1 K2 where Ki = J Pi with orthogonal projectors Pi; the
// backbone of the intersection formulas.
Eigen::MatrixXd product_kernel(const Eigen::MatrixXd& p_first,
                               const Eigen::MatrixXd& p_second,
                               const ToleranceConfig& cfg) {
  const Eigen::Index d = p_first.rows();
  const Eigen::MatrixXd j = j_form(d / 2);
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(d, d) + j * p_first * j * p_second;
  return null_space(m, cfg, 1.0).basis;
}

}  // namespace

GramianSVD svd_split(const Eigen::MatrixXd& wo, const ToleranceConfig& cfg) {
  cfg.validate();
  if (wo.rows() != wo.cols()) throw std::invalid_argument("svd_split: matrix must be square");
  if (wo.rows() == 0 || wo.rows() % 2 != 0)
    throw std::invalid_argument("svd_split: dimension must be positive and even");
  if (max_abs(wo - wo.transpose()) > cfg.residual_tol)
    throw std::invalid_argument("svd_split: matrix must be symmetric");

  const Eigen::MatrixXd sym = 0.5 * (wo + wo.transpose());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym, Eigen::ComputeFullU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double threshold = cfg.rank_rel_tol * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) ++rank;

  GramianSVD out;
  out.rank = rank;
  out.u1 = svd.matrixU().leftCols(rank);
  out.u2 = svd.matrixU().rightCols(wo.rows() - rank);
  out.sigma1 = sv.head(rank);
  if (rank > 0 && rank < sv.size() && sv(rank) > 0.0)
    out.gap = sv(rank - 1) / sv(rank);
  else
    out.gap = std::numeric_limits<double>::infinity();
  out.gap_warning = out.gap < cfg.gap_warn_factor;
  return out;
}

Eigen::MatrixXd co_subspace(const GramianSVD& svd, const ToleranceConfig& cfg) {
  const Eigen::Index d = svd.u1.rows();
  const Eigen::MatrixXd k = j_form(d / 2) * projector(svd.u1, d);
  const Eigen::MatrixXd basis =
      null_space(Eigen::MatrixXd::Identity(d, d) + k * k, cfg, 1.0).basis;
  if (basis.cols() % 2 != 0)
    throw std::runtime_error(
        "co_subspace: odd dimension " + std::to_string(basis.cols()) +
        " signals a rank misclassification at the SVD cut");
  return basis;
}

Eigen::MatrixXd cbar_obar_subspace(const GramianSVD& svd, const ToleranceConfig& cfg) {
  const Eigen::Index d = svd.u2.rows();
  const Eigen::MatrixXd k = j_form(d / 2) * projector(svd.u2, d);
  const Eigen::MatrixXd basis =
      null_space(Eigen::MatrixXd::Identity(d, d) + k * k, cfg, 1.0).basis;
  if (basis.cols() % 2 != 0)
    throw std::runtime_error(
        "cbar_obar_subspace: odd dimension " + std::to_string(basis.cols()) +
        " signals a rank misclassification at the SVD cut");
  return basis;
}

Eigen::MatrixXd cobar_subspace(const GramianSVD& svd, const ToleranceConfig& cfg,
                               double cross_check_tol) {
  const Eigen::Index d = svd.u1.rows();
  const Eigen::MatrixXd j = j_form(d / 2);
  const Eigen::MatrixXd p1 = projector(svd.u1, d);
  const Eigen::MatrixXd p2 = projector(svd.u2, d);

  // x in the kernel iff x = P2 x (uncontrollable by duality) and
  // x = J^T P1 J x (observable directions carried over by J).
  Eigen::MatrixXd stacked(2 * d, d);
  stacked.topRows(d) = Eigen::MatrixXd::Identity(d, d) - p2;
  stacked.bottomRows(d) = Eigen::MatrixXd::Identity(d, d) - j.transpose() * p1 * j;
  const Eigen::MatrixXd basis = null_space(stacked, cfg, 1.0).basis;

  const Eigen::MatrixXd alt = product_kernel(p1, p2, cfg);
  if (alt.cols() != basis.cols() ||
      (basis.cols() > 0 && max_principal_angle(basis, alt) > cross_check_tol))
    throw std::runtime_error(
        "cobar_subspace: stacked-kernel and product-kernel routes disagree (" +
        std::to_string(basis.cols()) + " vs " + std::to_string(alt.cols()) +
        " dimensions)");
  return basis;
}

Eigen::MatrixXd cbaro_subspace(const GramianSVD& svd, const Eigen::MatrixXd& cobar_basis,
                               const ToleranceConfig& cfg, double cross_check_tol) {
  const Eigen::Index d = svd.u1.rows();
  if (cobar_basis.rows() != d && cobar_basis.cols() > 0)
    throw std::invalid_argument("cbaro_subspace: basis dimension mismatch");
  const Eigen::MatrixXd j = j_form(d / 2);
  const Eigen::MatrixXd basis = j.transpose() * cobar_basis;

  const Eigen::MatrixXd alt =
      product_kernel(projector(svd.u2, d), projector(svd.u1, d), cfg);
  if (alt.cols() != basis.cols() ||
      (basis.cols() > 0 && max_principal_angle(basis, alt) > cross_check_tol))
    throw std::runtime_error(
        "cbaro_subspace: J-image and product-kernel routes disagree (" +
        std::to_string(basis.cols()) + " vs " + std::to_string(alt.cols()) +
        " dimensions)");
  return basis;
}

KalmanSubspaces extract_subspaces(const GramianSVD& svd, const ToleranceConfig& cfg) {
  KalmanSubspaces subs;
  subs.basis_co = co_subspace(svd, cfg);
  subs.basis_cbarobar = cbar_obar_subspace(svd, cfg);
  subs.basis_cobar = cobar_subspace(svd, cfg);
  subs.basis_cbaro = cbaro_subspace(svd, subs.basis_cobar, cfg);

  subs.n1 = subs.basis_co.cols() / 2;
  subs.n2 = subs.basis_cbarobar.cols() / 2;
  subs.n3 = subs.basis_cobar.cols();

  const Eigen::Index d = svd.u1.rows();
  const auto fail = [&](const std::string& what) {
    throw std::runtime_error(
        "extract_subspaces: " + what + " (2n=" + std::to_string(d) +
        ", rank=" + std::to_string(svd.rank) + ", n1=" + std::to_string(subs.n1) +
        ", n2=" + std::to_string(subs.n2) + ", n3=" + std::to_string(subs.n3) +
        "); the rank tolerance likely misclassified a singular value");
  };
  if (subs.basis_cbaro.cols() != subs.n3)
    fail("mixed blocks have different dimensions");
  if (2 * subs.n1 + 2 * subs.n2 + 2 * subs.n3 != d)
    fail("subspace dimensions do not add up to 2n");
  if (2 * subs.n1 + subs.n3 != svd.rank)
    fail("rank does not equal 2*n1 + n3");
  return subs;
}

SubspaceLawReport verify_subspace_laws(const KalmanSubspaces& subs, const GramianSVD& svd,
                                       double tol, const ToleranceConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = svd.u1.rows();
  const Eigen::MatrixXd j = j_form(d / 2);
  const Eigen::MatrixXd p1 = projector(svd.u1, d);
  const Eigen::MatrixXd p2 = projector(svd.u2, d);

  SubspaceLawReport out;

  // Eigenvalues of all four J Pj J Pk products cluster on {0, -1}.
  for (const auto* pj : {&p1, &p2}) {
    for (const auto* pk : {&p1, &p2}) {
      const Eigen::MatrixXd m = j * (*pj) * j * (*pk);
      Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
      for (Eigen::Index i = 0; i < d; ++i) {
        const std::complex<double> ev = es.eigenvalues()(i);
        const double dist = std::min(std::abs(ev), std::abs(ev + 1.0));
        out.eigenvalue_residual = std::max(out.eigenvalue_residual, dist);
      }
    }
  }

  // The four bases together form an orthonormal basis of the whole space.
  Eigen::MatrixXd q(d, d);
  Eigen::Index col = 0;
  for (const auto* basis :
       {&subs.basis_cobar, &subs.basis_co, &subs.basis_cbarobar, &subs.basis_cbaro}) {
    if (basis->cols() > 0) q.middleCols(col, basis->cols()) = *basis;
    col += basis->cols();
  }
  if (col != d)
    throw std::invalid_argument("verify_subspace_laws: bases do not fill the space");
  out.completeness_residual = max_abs(q.transpose() * q - Eigen::MatrixXd::Identity(d, d));

  // Defining projector identities: each subspace sits inside its two ranges.
  const Eigen::MatrixXd pj1 = j * p1 * j.transpose();  // projector onto J Im(U1)
  const Eigen::MatrixXd pj2 = j * p2 * j.transpose();
  const auto membership = [&](const Eigen::MatrixXd& basis, const Eigen::MatrixXd& pa,
                              const Eigen::MatrixXd& pb) {
    if (basis.cols() == 0) return 0.0;
    return std::max(max_abs(pa * basis - basis), max_abs(pb * basis - basis));
  };
  out.membership_residual = std::max(
      {membership(subs.basis_co, pj1, p1), membership(subs.basis_cobar, pj1, p2),
       membership(subs.basis_cbaro, pj2, p1), membership(subs.basis_cbarobar, pj2, p2)});

  // Independent recomputation of each intersection from stacked projectors.
  const auto intersection = [&](const Eigen::MatrixXd& pa, const Eigen::MatrixXd& pb) {
    Eigen::MatrixXd stacked(2 * d, d);
    stacked.topRows(d) = Eigen::MatrixXd::Identity(d, d) - pa;
    stacked.bottomRows(d) = Eigen::MatrixXd::Identity(d, d) - pb;
    return null_space(stacked, cfg, 1.0).basis;
  };
  const auto angle_to = [&](const Eigen::MatrixXd& basis, const Eigen::MatrixXd& pa,
                            const Eigen::MatrixXd& pb) {
    const Eigen::MatrixXd recomputed = intersection(pa, pb);
    if (recomputed.cols() != basis.cols()) return std::numbers::pi / 2;
    if (basis.cols() == 0) return 0.0;
    return max_principal_angle(basis, recomputed);
  };
  out.intersection_angle = std::max(
      {angle_to(subs.basis_co, pj1, p1), angle_to(subs.basis_cobar, pj1, p2),
       angle_to(subs.basis_cbaro, pj2, p1), angle_to(subs.basis_cbarobar, pj2, p2)});

  out.pass = out.eigenvalue_residual <= tol && out.completeness_residual <= tol &&
             out.membership_residual <= tol && out.intersection_angle <= tol;
  return out;
}

}  // namespace qkalman
