#include <random>

#include <benchmark/benchmark.h>

#include "hgmm/evaluation.hpp"
#include "hgmm/hierarchy.hpp"
#include "hgmm/mixture.hpp"

namespace {

using namespace hgmm;

const Dataset& noisy_iris() {
  static const Dataset ds = [] {
    std::mt19937_64 rng(1);
    return inject_uniform_noise(load_csv_file(HGMM_DATA_DIR "/iris.csv", "class"), 0.5, rng);
  }();
  return ds;
}

void BM_LogDensityRows(benchmark::State& state) {
  const Matrix& x = noisy_iris().features;
  const GaussianComponent g = GaussianComponent::from_moments(estimate_moments(x));
  for (auto _ : state) benchmark::DoNotOptimize(g.log_density_rows(x));
  state.SetItemsProcessed(state.iterations() * x.rows());
}
BENCHMARK(BM_LogDensityRows);

void BM_EmIteration(benchmark::State& state) {
  const Matrix& x = noisy_iris().features;
  const GaussianComponent bg = GaussianComponent::from_moments(estimate_moments(x));
  std::mt19937_64 rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const BackgroundMixture init = initialize(x, bg, n, true, rng);
  for (auto _ : state) benchmark::DoNotOptimize(m_step(x, e_step(init, x), init));
}
BENCHMARK(BM_EmIteration)->Arg(2)->Arg(3)->Arg(5);

void BM_BuildIris(benchmark::State& state) {
  BuildParams p;
  p.max_nodes = static_cast<std::size_t>(state.range(0));
  p.background_enabled = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(build(noisy_iris().features, p));
}
BENCHMARK(BM_BuildIris)->Args({3, 1})->Args({3, 0})->Args({8, 1})->Unit(benchmark::kMillisecond);

void BM_FMeasure(benchmark::State& state) {
  BuildParams p;
  p.max_nodes = 8;
  const Dendrogram tree = build(noisy_iris().features, p);
  const GroundTruth truth = GroundTruth::from_dataset(noisy_iris());
  for (auto _ : state) benchmark::DoNotOptimize(f_measure(tree, truth));
}
BENCHMARK(BM_FMeasure);

void BM_MannWhitney(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
  for (auto& v : x) v = normal(rng) + 0.3;
  for (auto& v : y) v = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(mann_whitney_u(x, y, Alternative::kGreater));
}
BENCHMARK(BM_MannWhitney)->Arg(8)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
