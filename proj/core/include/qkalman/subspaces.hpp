#pragma once

#include <Eigen/Core>

#include "qkalman/tolerance.hpp"

namespace qkalman {

// Rank-revealing split of the observability Gramian W_o = U1 S1 U1^T with
// Im(U1) the observable directions and Im(U2) = Ker(W_o).
struct GramianSVD {
  Eigen::MatrixXd u1;  // 2n x r
  Eigen::MatrixXd u2;  // 2n x (2n - r)
  Eigen::VectorXd sigma1;
  Eigen::Index rank = 0;
  double gap = 0.0;  // sigma_r / sigma_{r+1}; +inf when the cut is empty
  bool gap_warning = false;
};

GramianSVD svd_split(const Eigen::MatrixXd& wo, const ToleranceConfig& cfg = {});

// The four physically meaningful intersections. Each function returns an
// orthonormal basis; empty (2n x 0) when the component is absent.
//
// Controllable-and-observable: Ker(I + (J P1)^2) with P1 = U1 U1^T.
Eigen::MatrixXd co_subspace(const GramianSVD& svd, const ToleranceConfig& cfg = {});
// Neither controllable nor observable: Ker(I + (J P2)^2) with P2 = U2 U2^T.
Eigen::MatrixXd cbar_obar_subspace(const GramianSVD& svd, const ToleranceConfig& cfg = {});
// Controllable, unobservable: joint kernel of [I - P2; I - J^T P1 J], the
// numerically preferred route. Cross-checked against Ker(I + J P1 J P2).
Eigen::MatrixXd cobar_subspace(const GramianSVD& svd, const ToleranceConfig& cfg = {},
                               double cross_check_tol = 1e-7);
// Uncontrollable, observable: J^T times the controllable-unobservable basis.
// Cross-checked against Ker(I + J P2 J P1).
Eigen::MatrixXd cbaro_subspace(const GramianSVD& svd, const Eigen::MatrixXd& cobar_basis,
                               const ToleranceConfig& cfg = {},
                               double cross_check_tol = 1e-7);

struct KalmanSubspaces {
  Eigen::MatrixXd basis_co;        // 2n x 2n1
  Eigen::MatrixXd basis_cobar;     // 2n x n3
  Eigen::MatrixXd basis_cbaro;     // 2n x n3
  Eigen::MatrixXd basis_cbarobar;  // 2n x 2n2
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  Eigen::Index n3 = 0;
};

// All four subspaces with the dimension bookkeeping enforced:
// n1 + n2 + n3 = n, rank(W_o) = 2 n1 + n3, and the two mixed blocks have the
// same dimension. Violations throw std::runtime_error naming the counts, as
// they indicate a rank misclassification at the SVD cut.
KalmanSubspaces extract_subspaces(const GramianSVD& svd, const ToleranceConfig& cfg = {});

struct SubspaceLawReport {
  // Distance of the eigenvalues of J Pj J Pk from {0, -1}, worst case over
  // the four (j,k) products.
  double eigenvalue_residual = 0.0;
  // max|Q^T Q - I| for Q the 2n x 2n concatenation of the four bases.
  double completeness_residual = 0.0;
  // Defining projector identities of each subspace.
  double membership_residual = 0.0;
  // Largest principal angle between each basis and an independently
  // recomputed intersection of its two defining ranges.
  double intersection_angle = 0.0;
  bool pass = false;
};

SubspaceLawReport verify_subspace_laws(const KalmanSubspaces& subs, const GramianSVD& svd,
                                       double tol = 1e-7, const ToleranceConfig& cfg = {});

}  // namespace qkalman
