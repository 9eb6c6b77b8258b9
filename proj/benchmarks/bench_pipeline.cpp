#include <random>

#include <benchmark/benchmark.h>

#include "qkalman/decomposition.hpp"
#include "qkalman/golden.hpp"
#include "qkalman/gramians.hpp"
#include "qkalman/io.hpp"
#include "qkalman/subspaces.hpp"
#include "qkalman/system_model.hpp"

namespace {

using namespace qkalman;

SLHModel random_model(Eigen::Index n, Eigen::Index m, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd h(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < 2 * n; ++i)
    for (Eigen::Index k = 0; k < 2 * n; ++k) h(i, k) = dist(rng);
  h = (0.5 * (h + h.transpose())).eval();
  Eigen::MatrixXcd coupling(m, 2 * n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < 2 * n; ++k)
      coupling(i, k) = std::complex<double>(dist(rng), dist(rng));
  return make_model(std::move(h), std::move(coupling));
}

SLHModel model_for(int64_t n) {
  // n = 3 is the golden three-mode network; other sizes are randomized.
  if (n == 3) return gzpg17_model();
  return random_model(n, 2, static_cast<unsigned>(1000 + n));
}

void BM_BuildQuadrature(benchmark::State& state) {
  const SLHModel model = model_for(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_quadrature(model));
}

void BM_Gramians(benchmark::State& state) {
  const SLHModel model = model_for(state.range(0));
  const QuadratureSystem sys = build_quadrature(model);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_gramians(sys, model, 0.0, 1.0));
}

void BM_SvdSubspaces(benchmark::State& state) {
  const SLHModel model = model_for(state.range(0));
  const QuadratureSystem sys = build_quadrature(model);
  const GramianPair gram = compute_gramians(sys, model, 0.0, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(extract_subspaces(svd_split(gram.wo)));
}

void BM_Decomposition(benchmark::State& state) {
  const SLHModel model = model_for(state.range(0));
  const QuadratureSystem sys = build_quadrature(model);
  const GramianPair gram = compute_gramians(sys, model, 0.0, 1.0);
  const KalmanSubspaces subs = extract_subspaces(svd_split(gram.wo));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        apply_transformation(sys, model, build_transformation(subs)));
}

void BM_FullPipeline(benchmark::State& state) {
  SystemFile file;
  file.model = model_for(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(file));
}

}  // namespace

BENCHMARK(BM_BuildQuadrature)->Arg(2)->Arg(3)->Arg(4)->Arg(8);
BENCHMARK(BM_Gramians)->Arg(2)->Arg(3)->Arg(4)->Arg(8);
BENCHMARK(BM_SvdSubspaces)->Arg(2)->Arg(3)->Arg(4)->Arg(8);
BENCHMARK(BM_Decomposition)->Arg(2)->Arg(3)->Arg(4)->Arg(8);
BENCHMARK(BM_FullPipeline)->Arg(2)->Arg(3)->Arg(4)->Arg(8);

BENCHMARK_MAIN();
