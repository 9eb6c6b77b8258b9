#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "qkalman/golden.hpp"
#include "qkalman/gramians.hpp"
#include "qkalman/numerics.hpp"
#include "qkalman/symplectic.hpp"
#include "qkalman/system_model.hpp"
#include "test_support.hpp"

using namespace qkalman;
using qktest::max_abs;

namespace {

struct Fixture {
  SLHModel model;
  QuadratureSystem sys;
};

Fixture make_fixture() {
  Fixture f;
  f.model = gzpg17_model();
  f.sys = build_quadrature(f.model);
  return f;
}

}  // namespace

TEST_CASE("uncoupled model has zero Gramians") {
  std::mt19937 rng(11);
  Eigen::MatrixXd h = qktest::random_matrix(4, 4, rng);
  h = (0.5 * (h + h.transpose())).eval();
  const SLHModel model = make_model(h, Eigen::MatrixXcd::Zero(1, 4));
  const QuadratureSystem sys = build_quadrature(model);
  const GramianPair pair = compute_gramians(sys, model, 0.0, 1.0);
  CHECK(max_abs(pair.wc) == 0.0);
  CHECK(max_abs(pair.wo) == 0.0);
}

TEST_CASE("zero Hamiltonian freezes the flow: W_c = (s - t) B B^T") {
  std::mt19937 rng(13);
  const Eigen::MatrixXcd coupling = qktest::random_cmatrix(2, 6, rng);
  const SLHModel model = make_model(Eigen::MatrixXd::Zero(6, 6), coupling);
  const QuadratureSystem sys = build_quadrature(model);
  const double t = -1.0, s = 2.5;
  const GramianPair pair = compute_gramians(sys, model, t, s);
  CHECK(max_abs(pair.wc - (s - t) * sys.b * sys.b.transpose()) < 1e-12);
  CHECK(max_abs(pair.wo - (s - t) * sys.c.transpose() * sys.c) < 1e-12);
}

TEST_CASE("three-mode network: rank 3 and exact duality") {
  const auto [model, sys] = make_fixture();
  const GramianPair pair = compute_gramians(sys, model, 0.0, 1.0);

  CHECK(max_abs(pair.wo - pair.wo.transpose()) == 0.0);
  CHECK(max_abs(pair.wc - pair.wc.transpose()) == 0.0);
  CHECK(qktest::lu_rank(pair.wo) == 3);
  CHECK(qktest::lu_rank(pair.wc) == 3);

  const DualityReport report = verify_duality(pair);
  CHECK(report.pass);
  CHECK(report.residual < 1e-12);
  CHECK(report.rank_wo == 3);
  CHECK(report.rank_wc == 3);
}

TEST_CASE("duality is violated by an asymmetric perturbation") {
  const auto [model, sys] = make_fixture();
  GramianPair pair = compute_gramians(sys, model, 0.0, 1.0);
  pair.wo(0, 0) += 1e-3;
  const DualityReport report = verify_duality(pair);
  CHECK(!report.pass);
  CHECK(report.residual == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("duality holds on random models") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + trial % 4;
    const Eigen::Index m = 1 + trial % 2;
    const SLHModel model = qktest::random_model(n, m, rng);
    const QuadratureSystem sys = build_quadrature(model);
    const GramianPair pair = compute_gramians(sys, model, 0.0, 1.0);
    CHECK(verify_duality(pair).pass);
    CHECK(max_abs(pair.wo - j_form(n).transpose() * pair.wc * j_form(n)) < 1e-9);
  }
}

TEST_CASE("Gramians agree with composite-Simpson quadrature") {
  const auto [model, sys] = make_fixture();
  const Eigen::MatrixXd flow = j_form(3) * model.hamiltonian;
  const double h = 1.0;
  const GramianPair pair = compute_gramians(sys, model, 0.0, h);
  // W_c integrates e^{-tau F} B B^T e^{-tau F^T}; W_o the transposed flow.
  const Eigen::MatrixXd wc_ref =
      qktest::simpson_gramian(-flow, sys.b * sys.b.transpose(), h, 2000);
  const Eigen::MatrixXd wo_ref =
      qktest::simpson_gramian(flow.transpose(), sys.c.transpose() * sys.c, h, 2000);
  CHECK(max_abs(pair.wc - wc_ref) < 1e-8);
  CHECK(max_abs(pair.wo - wo_ref) < 1e-8);
}

TEST_CASE("structured matrices collapse when the flow is zero") {
  std::mt19937 rng(19);
  const Eigen::MatrixXcd coupling = qktest::random_cmatrix(1, 4, rng);
  const SLHModel model = make_model(Eigen::MatrixXd::Zero(4, 4), coupling);
  const QuadratureSystem sys = build_quadrature(model);
  const StructuredKalmanMatrices sk = structured_matrices(sys, model);
  REQUIRE(sk.os.rows() == 8);  // 2n blocks of 2m rows
  REQUIRE(sk.os.cols() == 4);
  REQUIRE(sk.cs.rows() == 4);
  REQUIRE(sk.cs.cols() == 8);
  CHECK(max_abs(sk.os.topRows(2) - sys.c) == 0.0);
  CHECK(max_abs(sk.os.bottomRows(6)) == 0.0);
  CHECK(max_abs(sk.cs.leftCols(2) - sys.b) == 0.0);
  CHECK(max_abs(sk.cs.rightCols(6)) == 0.0);
}

TEST_CASE("structured matrices of the three-mode network have rank 3") {
  const auto [model, sys] = make_fixture();
  const StructuredKalmanMatrices sk = structured_matrices(sys, model);
  CHECK(qktest::lu_rank(sk.os) == 3);
  CHECK(qktest::lu_rank(sk.cs) == 3);
  CHECK(svd_rank(sk.os) == 3);
  CHECK(svd_rank(sk.cs) == 3);
}

TEST_CASE("observability stack and controllability row are interleaved duals") {
  // blkdiag(J_m, -J_m, J_m, ...) Cs^T J_n = Os, alternating sign per power.
  std::mt19937 rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index n = 1 + trial % 3;
    const Eigen::Index m = 1 + trial % 2;
    const SLHModel model = qktest::random_model(n, m, rng);
    const QuadratureSystem sys = build_quadrature(model);
    const StructuredKalmanMatrices sk = structured_matrices(sys, model);
    std::vector<Eigen::MatrixXd> blocks;
    for (Eigen::Index k = 0; k < 2 * n; ++k)
      blocks.push_back((k % 2 == 0 ? 1.0 : -1.0) * j_form(m));
    const Eigen::MatrixXd lhs = block_diag(blocks) * sk.cs.transpose() * j_form(n);
    CHECK(max_abs(lhs - sk.os) < 1e-12);
  }
}

TEST_CASE("Gramian kernels and images match the structured matrices") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 12; ++trial) {
    const Eigen::Index n = 1 + trial % 3;
    const Eigen::Index m = 1 + trial % 2;
    const SLHModel model = qktest::random_model(n, m, rng);
    const QuadratureSystem sys = build_quadrature(model);
    const GramianPair pair = compute_gramians(sys, model, 0.0, 1.0);
    const StructuredKalmanMatrices sk = structured_matrices(sys, model);

    const NullSpaceResult ker_wo = null_space(pair.wo);
    const NullSpaceResult ker_os = null_space(sk.os);
    REQUIRE(ker_wo.rank == ker_os.rank);
    if (ker_wo.basis.cols() > 0)
      CHECK(max_principal_angle(ker_wo.basis, ker_os.basis) < 1e-7);

    // Im(W_c) = Im(Cs): compare orthonormal column spans via the transposes.
    const NullSpaceResult ker_wct = null_space(pair.wc.transpose());
    const NullSpaceResult ker_cst = null_space(sk.cs.transpose());
    REQUIRE(ker_wct.rank == ker_cst.rank);
    if (ker_wct.basis.cols() > 0)
      CHECK(max_principal_angle(ker_wct.basis, ker_cst.basis) < 1e-7);
  }
}

TEST_CASE("rank and kernel do not depend on the horizon") {
  const auto [model, sys] = make_fixture();
  const std::vector<std::pair<double, double>> horizons = {
      {0.0, 1.0}, {0.0, 0.1}, {-2.0, 3.0}};
  const HorizonIndependenceReport report =
      verify_horizon_independence(sys, model, horizons);
  CHECK(report.pass);
  REQUIRE(report.ranks.size() == 3);
  for (const Eigen::Index r : report.ranks) CHECK(r == 3);
  CHECK(report.max_kernel_angle < 1e-8);
}

TEST_CASE("horizon independence for the extreme ranks") {
  SUBCASE("uncoupled model: rank stays zero") {
    std::mt19937 rng(31);
    Eigen::MatrixXd h = qktest::random_matrix(4, 4, rng);
    h = (0.5 * (h + h.transpose())).eval();
    const SLHModel model = make_model(h, Eigen::MatrixXcd::Zero(1, 4));
    const QuadratureSystem sys = build_quadrature(model);
    const HorizonIndependenceReport report =
        verify_horizon_independence(sys, model, {{0.0, 1.0}, {0.0, 2.0}});
    CHECK(report.pass);
    for (const Eigen::Index r : report.ranks) CHECK(r == 0);
  }

  SUBCASE("passive cavity: full rank 2") {
    const double omega = 1.3, kappa = 0.7;
    Eigen::MatrixXcd coupling(1, 2);
    coupling << std::sqrt(kappa / 2.0), std::complex<double>(0, std::sqrt(kappa / 2.0));
    const SLHModel model =
        make_model(omega * Eigen::MatrixXd::Identity(2, 2), coupling);
    const QuadratureSystem sys = build_quadrature(model);
    const HorizonIndependenceReport report =
        verify_horizon_independence(sys, model, {{0.0, 1.0}, {-1.0, 0.5}});
    CHECK(report.pass);
    for (const Eigen::Index r : report.ranks) CHECK(r == 2);
  }
}

TEST_CASE("effective_horizon caps the flow-scaled length at 50") {
  const SLHModel model = gzpg17_model();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j_form(3) * model.hamiltonian);
  const double norm = svd.singularValues()(0);
  REQUIRE(norm > 0.0);

  const Horizon keep = effective_horizon(model, 0.0, 1.0);
  CHECK(!keep.shrunk);
  CHECK(keep.s == 1.0);

  const Horizon cap = effective_horizon(model, 0.0, 1000.0);
  CHECK(cap.shrunk);
  CHECK(cap.t == 0.0);
  CHECK(norm * (cap.s - cap.t) == doctest::Approx(50.0));

  // The cap moves s toward t, never past it.
  const Horizon neg = effective_horizon(model, -500.0, 500.0);
  CHECK(neg.shrunk);
  CHECK(neg.s > neg.t);
}
