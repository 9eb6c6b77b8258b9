#pragma once

#include <Eigen/Core>

namespace qkalman {

// Open quantum harmonic network with identity scattering: quadratic
// Hamiltonian (1/2) x^T hamiltonian x and linear field coupling L = coupling * x
// in the quadrature vector x = (q_1..q_n, p_1..p_n).
struct SLHModel {
  Eigen::Index n = 0;  // oscillator modes
  Eigen::Index m = 0;  // input/output fields
  Eigen::MatrixXd hamiltonian;   // 2n x 2n, symmetric
  Eigen::MatrixXcd coupling;     // m x 2n
};

// Validates shapes, symmetrizes hamiltonian when its asymmetry is within
// symmetry_tol and rejects it otherwise.
SLHModel make_model(Eigen::MatrixXd hamiltonian, Eigen::MatrixXcd coupling,
                    double symmetry_tol = 1e-9);

// Quadrature-domain state-space realization
//   dx = A x dt + B du,  dy = C x dt + D du.
struct QuadratureSystem {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Eigen::MatrixXd a;  // 2n x 2n
  Eigen::MatrixXd b;  // 2n x 2m
  Eigen::MatrixXd c;  // 2m x 2n
  Eigen::MatrixXd d;  // 2m x 2m, identity under trivial scattering
};

// C = sqrt(2) [Re coupling; Im coupling], B = -C^#, A = J H - (1/2) C^# C,
// D = I. The output satisfies the physical-realizability identities below by
// construction.
QuadratureSystem build_quadrature(const SLHModel& model, double symmetry_tol = 1e-9);

struct RealizabilityReport {
  double residual_state = 0.0;  // max|A + A^# + B B^#|
  double residual_io = 0.0;     // max|B + C^# D^#|
  bool pass = false;
};

// Both identities within tol. A system violating them does not correspond to
// any open quantum harmonic network.
RealizabilityReport check_physical_realizability(const QuadratureSystem& sys,
                                                 double tol = 1e-9);

struct CommutationReport {
  double residual = 0.0;  // max|T^T J_n T - j_target|
  bool pass = false;
};

// Whether the (possibly rectangular, 2n x d) map t preserves canonical
// commutation relations encoded by j_target (d x d).
CommutationReport check_commutation_preserving(const Eigen::MatrixXd& t,
                                               const Eigen::MatrixXd& j_target,
                                               double tol = 1e-9);

}  // namespace qkalman
