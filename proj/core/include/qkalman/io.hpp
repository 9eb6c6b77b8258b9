#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qkalman/decomposition.hpp"
#include "qkalman/gramians.hpp"
#include "qkalman/subspaces.hpp"
#include "qkalman/system_model.hpp"

namespace qkalman {

struct SolveOptions {
  double horizon_t = 0.0;
  double horizon_s = 1.0;
  std::optional<double> rank_tol;  // overrides ToleranceConfig::rank_rel_tol
  BlockOrdering ordering = BlockOrdering::Ttilde;
};

struct SystemFile {
  SLHModel model;
  SolveOptions options;
};

// JSON system description:
//   n, m           positive integers (m may be zero)
//   hamiltonian    2n x 2n array of arrays
//   coupling_re,
//   coupling_im    m x 2n arrays
//   options        optional: horizon [t, s], rank_tol, ordering "T"|"Ttilde"
// All violations (missing fields, shape mismatches, non-finite entries,
// asymmetric hamiltonian, bad option values) are collected and reported in a
// single std::invalid_argument.
SystemFile parse_system_json(const std::string& text);
SystemFile parse_system_file(const std::string& path);

std::string system_file_to_json(const SystemFile& file);
void write_system_file(const SystemFile& file, const std::string& path);

// Pass thresholds for the per-run verification summary. Defaults match the
// suite in tests/acceptance.cpp.
struct ReportThresholds {
  double physical_realizability = 1e-10;
  double gramian_duality = 1e-9;
  double orthogonality = 1e-10;
  double block_symplectic = 1e-10;
  double structural_zeros = 1e-8;
  double hamiltonian_block = 1e-8;
  double transfer_invariance = 1e-9;
};

struct DecompositionReport {
  Eigen::Index n = 0, m = 0;
  Eigen::Index n1 = 0, n2 = 0, n3 = 0;
  std::string ordering;  // ordering of the serialized barred matrices

  Eigen::MatrixXd t, t_tilde;
  Eigen::MatrixXd a_bar_raw, a_bar_clean, b_bar, c_bar, h_bar;
  Eigen::MatrixXd lambda_bar_re, lambda_bar_im;
  Eigen::MatrixXd p_co, p_cobar, p_cbaro, p_cbarobar;  // orthogonal projectors

  double residual_physical_realizability = 0.0;
  double residual_gramian_duality = 0.0;
  double residual_orthogonality = 0.0;
  double residual_block_symplectic = 0.0;
  double residual_structural_zeros = 0.0;
  double residual_hamiltonian_block = 0.0;
  double residual_transfer_invariance = 0.0;

  std::vector<std::string> warnings;

  bool all_pass(const ReportThresholds& thresholds = {}) const;
  // Deterministic serialization: fixed key order, every floating-point number
  // printed with 17 significant digits so values round-trip bit-exactly.
  std::string to_json() const;
};

struct PipelineResult {
  QuadratureSystem sys;
  GramianPair gramians;
  GramianSVD svd;
  KalmanSubspaces subspaces;
  KalmanDecomposition decomposition;
  RealizabilityReport realizability;
  DualityReport duality;
  SubspaceLawReport laws;
  StructureReport structure;
  TransferInvarianceReport transfer;
  DecompositionReport report;
  bool all_pass = false;
};

// Full pipeline: build, realizability check, Gramians (with the horizon cap),
// duality, SVD split, subspaces, transformation, structure verification,
// transfer-function invariance, report assembly.
PipelineResult run_pipeline(const SystemFile& input, const ReportThresholds& thresholds = {});

// CLI-facing overrides for options stored in the input file.
struct CliOverrides {
  std::optional<double> rank_tol;
  std::optional<std::pair<double, double>> horizon;
  std::optional<BlockOrdering> ordering;
};

// Exit codes: 0 all checks pass, 1 input/IO error, 2 verification failure.
int run_decompose(const std::string& input_path, const std::string& output_path,
                  const CliOverrides& overrides = {});
int run_check(const std::string& input_path, bool inject_nonrealizable = false);
int run_example(const std::string& name, double omega, double lambda, double gamma,
                const std::string& output_path);

// The one built-in input ("gzpg17"); throws std::invalid_argument on other names.
SystemFile builtin_example(const std::string& name, double omega = 2.0,
                           double lambda = 1.0, double gamma = std::numbers::sqrt2);

}  // namespace qkalman
