#pragma once

#include <stdexcept>

namespace qkalman {

// Numerical thresholds shared across the pipeline.
struct ToleranceConfig {
  // Singular values below rank_rel_tol * sigma_max are treated as zero when
  // deciding ranks and kernels.
  double rank_rel_tol = 1e-12;
  // Max-abs entry bound under which a residual matrix counts as zero.
  double residual_tol = 1e-9;
  // A rank cut with kept/dropped singular-value ratio below this factor is
  // flagged as ill-separated.
  double gap_warn_factor = 10.0;

  void validate() const {
    if (!(rank_rel_tol > 0.0) || !(residual_tol > 0.0))
      throw std::invalid_argument("ToleranceConfig: tolerances must be positive");
    if (!(gap_warn_factor > 1.0))
      throw std::invalid_argument("ToleranceConfig: gap_warn_factor must exceed 1");
  }
};

}  // namespace qkalman
