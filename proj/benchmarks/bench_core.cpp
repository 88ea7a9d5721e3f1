#include <benchmark/benchmark.h>

#include "oobcov/compressed.hpp"
#include "oobcov/metrics.hpp"
#include "oobcov/precoding.hpp"
#include "oobcov/translation.hpp"

using namespace oobcov;

static void BM_HermitianEigen(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  Rng rng(7);
  CMat a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = complex_normal(rng);
  const CMat r = a * a.adjoint();
  for (auto _ : state) benchmark::DoNotOptimize(linalg::hermitian_eigen(r));
}
BENCHMARK(BM_HermitianEigen)->Arg(8)->Arg(32)->Arg(64);

static void BM_Translate(benchmark::State& state) {
  const UlaGeometry sub6(8), mm(64);
  const auto r = synthesize_multicluster(
      {{0.5, theoretical_covariance(PasKind::truncated_gaussian, deg2rad(5), deg2rad(3), sub6)},
       {0.5, theoretical_covariance(PasKind::truncated_gaussian, deg2rad(25), deg2rad(3), sub6)}},
      0.01);
  for (auto _ : state) benchmark::DoNotOptimize(translate(r, sub6, mm, 30));
}
BENCHMARK(BM_Translate);

static void BM_LwDcomp(benchmark::State& state) {
  const int t_count = static_cast<int>(state.range(0));
  const UlaGeometry rx(64), tx(32);
  Rng rng(11);
  const PhaseCodebook cb(2);
  std::vector<CMat> channels, combiners;
  const CVec ar = array_response(rx, deg2rad(12));
  const CVec at = array_response(tx, deg2rad(-20));
  for (int t = 0; t < t_count; ++t) {
    channels.push_back(std::sqrt(64.0 * 32.0) * complex_normal(rng) * ar * at.adjoint());
    combiners.push_back(random_rf_matrix(64, 16, cb, rng));
  }
  const auto snaps = collect_snapshots(channels, combiners, 0.1, rng);
  const auto dict = build_dictionary(rx, 2);
  const auto w = uniform_weights(dict.size());
  for (auto _ : state) benchmark::DoNotOptimize(lw_dcomp(snaps, dict, 0.1, w));
}
BENCHMARK(BM_LwDcomp)->Arg(10)->Arg(30)->Arg(80);

static void BM_DesignHybrid(benchmark::State& state) {
  const UlaGeometry g(64);
  const auto r = theoretical_covariance(PasKind::truncated_gaussian, deg2rad(10), deg2rad(3), g);
  const PhaseCodebook cb(2);
  for (auto _ : state) benchmark::DoNotOptimize(design_hybrid(r, 16, 4, cb, 128));
}
BENCHMARK(BM_DesignHybrid);

BENCHMARK_MAIN();
