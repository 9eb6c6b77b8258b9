#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "qkalman/tolerance.hpp"

namespace qkalman {

// e^M for square M, scaling-and-squaring Pade approximation.
Eigen::MatrixXd mat_exp(const Eigen::MatrixXd& m);

// integral_0^h e^{M s} Q e^{M^T s} ds for symmetric Q, computed from one
// exponential of the doubled block matrix [[-M, Q], [0, M^T]] and returned
// symmetrized as (W + W^T)/2. Throws on h <= 0 or asymmetric Q.
Eigen::MatrixXd van_loan_gramian(const Eigen::MatrixXd& m, const Eigen::MatrixXd& q,
                                 double h, double symmetry_tol = 1e-9);

struct NullSpaceResult {
  Eigen::MatrixXd basis;  // orthonormal columns spanning the numerical kernel
  Eigen::VectorXd singular_values;
  Eigen::Index rank = 0;
  // Smallest kept singular value over largest dropped one; +inf when either
  // side of the cut is empty.
  double gap = 0.0;
  bool gap_warning = false;
};

// Numerical kernel of m: right singular vectors whose singular values fall at
// or below rank_rel_tol * max(sigma_max, scale_floor). Pass the natural scale
// of m as scale_floor when it is known (projector algebra lives at scale 1);
// otherwise an all-roundoff matrix would count as full rank.
NullSpaceResult null_space(const Eigen::MatrixXd& m, const ToleranceConfig& cfg = {},
                           double scale_floor = 0.0);

// Rank by the same singular-value threshold as null_space.
Eigen::Index svd_rank(const Eigen::MatrixXd& m, const ToleranceConfig& cfg = {});

// Component of v orthogonal to the span of the orthonormal columns of basis,
// normalized; nullopt when the residual norm is <= tol. Two projection passes
// keep the result orthogonal to working precision.
std::optional<Eigen::VectorXd> orthonormalize_against(const Eigen::VectorXd& v,
                                                      const Eigen::MatrixXd& basis,
                                                      double tol = 1e-8);

// Largest principal angle (radians) between the spans of two orthonormal
// column blocks of equal dimension, computed through sines for small-angle
// accuracy. Throws when the column counts differ.
double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

Eigen::MatrixXd block_diag(const std::vector<Eigen::MatrixXd>& blocks);

}  // namespace qkalman
