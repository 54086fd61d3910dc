#include <benchmark/benchmark.h>

#include "tomita/average_distance.hpp"
#include "tomita/edit_distance.hpp"
#include "tomita/kmeans.hpp"
#include "tomita/model.hpp"
#include "tomita/rng.hpp"
#include "tomita/tomita.hpp"
#include "tomita/verification.hpp"

namespace {

std::string random_string(tomita::Rng& rng, std::size_t n) {
  std::string x(n, '0');
  for (auto& c : x) c = rng.below(2) ? '1' : '0';
  return x;
}

void BM_EditDistance(benchmark::State& state) {
  tomita::Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_string(rng, n);
  const auto b = random_string(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(tomita::edit_distance(a, b));
}
BENCHMARK(BM_EditDistance)->Arg(14)->Arg(200);

void BM_AverageDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tomita::average_edit_distance_at_n(tomita::GrammarId(7), n));
  }
}
BENCHMARK(BM_AverageDistance)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const auto kind = static_cast<tomita::CellKind>(state.range(0));
  const auto model = tomita::init_model(kind, 8, 1);
  tomita::Rng rng(2);
  const auto x = random_string(rng, 200);
  for (auto _ : state) benchmark::DoNotOptimize(model.classify(x));
  state.SetLabel(std::string(tomita::to_string(kind)));
}
BENCHMARK(BM_Forward)->DenseRange(0, 4);

void BM_KMeans(benchmark::State& state) {
  tomita::Rng rng(3);
  Eigen::MatrixXd points(8, 2000);
  for (Eigen::Index i = 0; i < points.size(); ++i) points.data()[i] = rng.uniform();
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tomita::kmeans(points, k, 4, 100, 3).wcss);
}
BENCHMARK(BM_KMeans)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_Neighborhood(benchmark::State& state) {
  tomita::Rng rng(4);
  const auto x = random_string(rng, 200);
  for (auto _ : state) benchmark::DoNotOptimize(tomita::neighborhood(x, 1).size());
}
BENCHMARK(BM_Neighborhood);

}  // namespace

BENCHMARK_MAIN();
