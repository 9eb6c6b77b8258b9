#pragma once

#include <numbers>

#include <Eigen/Core>

#include "qkalman/system_model.hpp"

namespace qkalman {

// Three-mode network with one field: modes 1 and 2 couple to mode 3 with
// strength lambda, mode 3 is a detuned cavity (omega) coupled to the field
// with rate gamma. Its decomposition has one block of each kind
// (n1 = n2 = n3 = 1), which makes it the standard smoke test for the whole
// pipeline. The "gzpg17" name is the identifier the CLI exposes.
SLHModel gzpg17_model(double omega = 2.0, double lambda = 1.0,
                      double gamma = std::numbers::sqrt2);

// Closed-form decomposition of gzpg17_model, valid for any omega, lambda and
// nonzero gamma. t_tilde columns are ordered [cobar | cbaro | co | cbarobar];
// the barred matrices are stated in that ordering. t_breve is a further
// orthogonal basis change onto sum/difference quadrature coordinates, and
// x_breve_rows * x gives those coordinates directly (x_breve_rows =
// t_breve * t_tilde^T).
struct GoldenExample {
  SLHModel model;
  Eigen::MatrixXd t_tilde;      // 6 x 6
  Eigen::MatrixXd a_bar;        // 6 x 6
  Eigen::MatrixXd b_bar;        // 6 x 2
  Eigen::MatrixXd c_bar;        // 2 x 6
  Eigen::MatrixXd h_bar;        // 6 x 6
  Eigen::MatrixXcd lambda_bar;  // 1 x 6
  Eigen::MatrixXd t_breve;      // 6 x 6
  Eigen::MatrixXd x_breve_rows;  // 6 x 6
};

GoldenExample gzpg17_golden(double omega = 2.0, double lambda = 1.0,
                            double gamma = std::numbers::sqrt2);

}  // namespace qkalman
