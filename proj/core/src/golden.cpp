#include "qkalman/golden.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qkalman {

SLHModel gzpg17_model(double omega, double lambda, double gamma) {
  if (!std::isfinite(omega) || !std::isfinite(lambda) || !std::isfinite(gamma))
    throw std::invalid_argument("gzpg17_model: parameters must be finite");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(6, 6);
  h(0, 2) = h(2, 0) = lambda;
  h(1, 2) = h(2, 1) = lambda;
  h(2, 2) = omega;
  h(5, 5) = omega;
  Eigen::MatrixXcd coupling = Eigen::MatrixXcd::Zero(1, 6);
  const double g = gamma / std::numbers::sqrt2;
  coupling(0, 2) = std::complex<double>(g, 0.0);
  coupling(0, 5) = std::complex<double>(0.0, g);
  return make_model(h, coupling);
}

GoldenExample gzpg17_golden(double omega, double lambda, double gamma) {
  if (gamma == 0.0)
    throw std::invalid_argument("gzpg17_golden: gamma must be nonzero");
  GoldenExample g;
  g.model = gzpg17_model(omega, lambda, gamma);

  const double a = 1.0 / std::numbers::sqrt2;
  const double hh = 0.5;
  g.t_tilde.resize(6, 6);
  g.t_tilde << 0, a, 0, 0, hh, hh,
               0, a, 0, 0, -hh, -hh,
               0, 0, -a, -a, 0, 0,
               -a, 0, 0, 0, -hh, hh,
               -a, 0, 0, 0, hh, -hh,
               0, 0, a, -a, 0, 0;

  const double kappa = 0.5 * gamma * gamma;
  g.a_bar = Eigen::MatrixXd::Zero(6, 6);
  g.a_bar(0, 2) = -lambda;
  g.a_bar(0, 3) = -lambda;
  g.a_bar(2, 1) = -lambda;
  g.a_bar(2, 2) = -kappa;
  g.a_bar(2, 3) = omega;
  g.a_bar(3, 1) = lambda;
  g.a_bar(3, 2) = -omega;
  g.a_bar(3, 3) = -kappa;

  const double ga = gamma * a;
  g.b_bar = Eigen::MatrixXd::Zero(6, 2);
  g.b_bar(2, 0) = ga;
  g.b_bar(2, 1) = -ga;
  g.b_bar(3, 0) = ga;
  g.b_bar(3, 1) = ga;

  g.c_bar = Eigen::MatrixXd::Zero(2, 6);
  g.c_bar(0, 2) = -ga;
  g.c_bar(0, 3) = -ga;
  g.c_bar(1, 2) = ga;
  g.c_bar(1, 3) = -ga;

  g.h_bar = Eigen::MatrixXd::Zero(6, 6);
  g.h_bar(1, 2) = g.h_bar(2, 1) = -lambda;
  g.h_bar(1, 3) = g.h_bar(3, 1) = -lambda;
  g.h_bar(2, 2) = omega;
  g.h_bar(3, 3) = omega;

  g.lambda_bar = Eigen::MatrixXcd::Zero(1, 6);
  g.lambda_bar(0, 2) = std::complex<double>(-0.5 * gamma, 0.5 * gamma);
  g.lambda_bar(0, 3) = std::complex<double>(-0.5 * gamma, -0.5 * gamma);

  g.t_breve.resize(6, 6);
  g.t_breve << 0, 0, -a, -a, 0, 0,
               0, 1, 0, 0, 0, 0,
               0, 0, 0, 0, a, a,
               0, 0, a, -a, 0, 0,
               -1, 0, 0, 0, 0, 0,
               0, 0, 0, 0, -a, a;

  // Rows read off the sum/difference quadratures directly:
  // (q3, (q1+q2)/sqrt2, (q1-q2)/sqrt2, p3, (p1+p2)/sqrt2, (p1-p2)/sqrt2).
  g.x_breve_rows = Eigen::MatrixXd::Zero(6, 6);
  g.x_breve_rows(0, 2) = 1;
  g.x_breve_rows(1, 0) = g.x_breve_rows(1, 1) = a;
  g.x_breve_rows(2, 0) = a;
  g.x_breve_rows(2, 1) = -a;
  g.x_breve_rows(3, 5) = 1;
  g.x_breve_rows(4, 3) = g.x_breve_rows(4, 4) = a;
  g.x_breve_rows(5, 3) = a;
  g.x_breve_rows(5, 4) = -a;
  return g;
}

}  // namespace qkalman
