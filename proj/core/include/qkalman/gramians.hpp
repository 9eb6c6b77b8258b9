#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qkalman/system_model.hpp"
#include "qkalman/tolerance.hpp"

namespace qkalman {

// Finite-horizon Gramians taken along the Hamiltonian-only flow J*H, not the
// damped generator A. With that choice W_o = J^T W_c J holds exactly and the
// ranks and kernels are independent of the horizon.
struct GramianPair {
  Eigen::MatrixXd wo;  // observability Gramian, symmetric PSD
  Eigen::MatrixXd wc;  // controllability Gramian, symmetric PSD
  double t = 0.0;
  double s = 1.0;
};

Eigen::MatrixXd controllability_gramian(const QuadratureSystem& sys,
                                        const SLHModel& model, double t, double s);
Eigen::MatrixXd observability_gramian(const QuadratureSystem& sys,
                                      const SLHModel& model, double t, double s);
GramianPair compute_gramians(const QuadratureSystem& sys, const SLHModel& model,
                             double t, double s);

// Stacked observability block [C; C(JH); ...; C(JH)^{2n-1}] (4nm x 2n) and
// concatenated controllability block [B, (JH)B, ..., (JH)^{2n-1}B] (2n x 4nm).
// Their kernel and image match those of the Gramians.
struct StructuredKalmanMatrices {
  Eigen::MatrixXd os;
  Eigen::MatrixXd cs;
};

StructuredKalmanMatrices structured_matrices(const QuadratureSystem& sys,
                                             const SLHModel& model);

struct DualityReport {
  double residual = 0.0;  // max|W_o - J^T W_c J|
  Eigen::Index rank_wo = 0;
  Eigen::Index rank_wc = 0;
  bool pass = false;
};

DualityReport verify_duality(const GramianPair& pair, const ToleranceConfig& cfg = {});

struct HorizonIndependenceReport {
  std::vector<Eigen::Index> ranks;  // one per horizon
  double max_kernel_angle = 0.0;    // radians, worst pair of horizons
  bool pass = false;
};

// Recomputes W_o on each horizon and checks that the rank and the kernel span
// do not move.
HorizonIndependenceReport verify_horizon_independence(
    const QuadratureSystem& sys, const SLHModel& model,
    const std::vector<std::pair<double, double>>& horizons,
    const ToleranceConfig& cfg = {}, double angle_tol = 1e-8);

struct Horizon {
  double t = 0.0;
  double s = 1.0;
  bool shrunk = false;
};

// Caps ||J H||_2 * (s - t) at 50 by moving s toward t, so the doubled-matrix
// exponential stays in a well-conditioned regime. Rank and kernels are
// unaffected by the cap.
Horizon effective_horizon(const SLHModel& model, double t, double s);

}  // namespace qkalman
