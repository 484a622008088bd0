#include <random>

#include <benchmark/benchmark.h>

#include "nehs/alignment.hpp"

namespace {

nehs::EmbeddingSpace random_space(std::size_t dim, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  nehs::EmbeddingSpace space(dim);
  for (std::size_t i = 0; i < count; ++i) {
    nehs::Vector v(static_cast<Eigen::Index>(dim));
    for (auto& x : v) x = normal(rng);
    space.add("w" + std::to_string(i), v);
  }
  return space;
}

// Cost of 100 generator steps at the default critic size.
void BM_AdversarialSteps(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto source = random_space(dim, 500, 4);
  const auto target = random_space(dim, 500, 5);
  nehs::AdversarialConfig cfg;
  cfg.steps = 100;
  for (auto _ : state) benchmark::DoNotOptimize(nehs::train_adversarial(source, target, cfg));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_AdversarialSteps)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Procrustes(benchmark::State& state) {
  const auto source = random_space(64, 1000, 6);
  std::vector<nehs::Vector> src;
  std::vector<nehs::Vector> tgt;
  for (std::size_t i = 0; i < source.size(); ++i) {
    src.push_back(source.vector(i));
    tgt.push_back(-source.vector(i));
  }
  for (auto _ : state) benchmark::DoNotOptimize(nehs::procrustes(src, tgt));
}
BENCHMARK(BM_Procrustes)->Unit(benchmark::kMillisecond);

}  // namespace
