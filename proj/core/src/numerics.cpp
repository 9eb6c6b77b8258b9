#include "qkalman/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace qkalman {

Eigen::MatrixXd mat_exp(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("mat_exp: matrix must be square");
  if (m.rows() == 0) return m;
  return m.exp();
}

Eigen::MatrixXd van_loan_gramian(const Eigen::MatrixXd& m, const Eigen::MatrixXd& q,
                                 double h, double symmetry_tol) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("van_loan_gramian: generator must be square");
  if (q.rows() != m.rows() || q.cols() != m.cols())
    throw std::invalid_argument("van_loan_gramian: weight shape does not match generator");
  if (!(h > 0.0)) throw std::invalid_argument("van_loan_gramian: horizon must be positive");
  const Eigen::Index d = m.rows();
  if (d == 0) return m;
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > symmetry_tol)
    throw std::invalid_argument("van_loan_gramian: weight must be symmetric");

  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  block.topLeftCorner(d, d) = -m;
  block.topRightCorner(d, d) = 0.5 * (q + q.transpose());
  block.bottomRightCorner(d, d) = m.transpose();
  const Eigen::MatrixXd f = mat_exp(block * h);
  const Eigen::MatrixXd w =
      f.bottomRightCorner(d, d).transpose() * f.topRightCorner(d, d);
  return 0.5 * (w + w.transpose());
}

NullSpaceResult null_space(const Eigen::MatrixXd& m, const ToleranceConfig& cfg,
                           double scale_floor) {
  cfg.validate();
  NullSpaceResult out;
  const Eigen::Index cols = m.cols();
  if (cols == 0 || m.rows() == 0) {
    out.basis = Eigen::MatrixXd::Identity(cols, cols);
    out.singular_values = Eigen::VectorXd::Zero(0);
    out.rank = 0;
    out.gap = std::numeric_limits<double>::infinity();
    return out;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sigma_max = sv(0);
  // For matrices with a known natural scale (projector algebra lives at scale
  // 1) the caller passes it as scale_floor so that an all-noise matrix is
  // treated as zero instead of full rank.
  const double threshold = cfg.rank_rel_tol * std::max(sigma_max, scale_floor);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) ++rank;

  out.singular_values = sv;
  out.rank = rank;
  out.basis = svd.matrixV().rightCols(cols - rank);
  if (rank > 0 && rank < sv.size() && sv(rank) > 0.0)
    out.gap = sv(rank - 1) / sv(rank);
  else
    out.gap = std::numeric_limits<double>::infinity();
  out.gap_warning = out.gap < cfg.gap_warn_factor;
  return out;
}

Eigen::Index svd_rank(const Eigen::MatrixXd& m, const ToleranceConfig& cfg) {
  cfg.validate();
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double threshold = cfg.rank_rel_tol * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) ++rank;
  return rank;
}

std::optional<Eigen::VectorXd> orthonormalize_against(const Eigen::VectorXd& v,
                                                      const Eigen::MatrixXd& basis,
                                                      double tol) {
  if (basis.cols() > 0 && basis.rows() != v.size())
    throw std::invalid_argument("orthonormalize_against: dimension mismatch");
  Eigen::VectorXd r = v;
  if (basis.cols() > 0) {
    r -= basis * (basis.transpose() * r);
    r -= basis * (basis.transpose() * r);
  }
  const double nrm = r.norm();
  if (nrm <= tol) return std::nullopt;
  return Eigen::VectorXd(r / nrm);
}

double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("max_principal_angle: subspace dimensions differ");
  if (a.cols() == 0) return 0.0;
  if (a.rows() != b.rows())
    throw std::invalid_argument("max_principal_angle: ambient dimensions differ");
  const Eigen::MatrixXd residual = b - a * (a.transpose() * b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  const double s = std::clamp(svd.singularValues()(0), 0.0, 1.0);
  return std::asin(s);
}

Eigen::MatrixXd block_diag(const std::vector<Eigen::MatrixXd>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace qkalman
