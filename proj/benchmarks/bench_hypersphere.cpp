#include <random>

#include <benchmark/benchmark.h>

#include "nehs/hypersphere.hpp"

namespace {

nehs::Vector gaussian(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  nehs::Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

void BM_EuclideanDistance(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto dim = static_cast<Eigen::Index>(state.range(0));
  const nehs::Vector a = gaussian(dim, rng);
  const nehs::Vector b = gaussian(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nehs::euclidean_distance(a, b));
}
BENCHMARK(BM_EuclideanDistance)->Arg(64)->Arg(300);

void BM_FitRadius(benchmark::State& state) {
  std::mt19937_64 rng(2);
  nehs::Universe universe;
  for (int64_t i = 0; i < state.range(0); ++i) universe.add("w" + std::to_string(i), gaussian(64, rng), i % 10 == 0);
  const nehs::Vector center = gaussian(64, rng);
  const auto threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(nehs::fit_radius(center, universe, threads));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitRadius)->Args({10000, 1})->Args({100000, 1})->Args({100000, 4})->Unit(benchmark::kMillisecond);

}  // namespace
