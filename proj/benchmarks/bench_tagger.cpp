#include <random>

#include <benchmark/benchmark.h>

#include "nehs/tagger.hpp"

namespace {

struct Setup {
  nehs::CrfModel model;
  nehs::FeatureMatrix features;
  std::vector<std::size_t> tags;
};

Setup make_setup(std::size_t length) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 0.3);
  nehs::FeatureSpec spec;
  spec.embedding_dim = 64;
  spec.hypersphere = true;
  Setup s{nehs::CrfModel({"O", "B-PER", "I-PER", "B-LOC", "I-LOC", "B-ORG", "I-ORG"}, spec), {}, {}};
  for (Eigen::Index r = 0; r < s.model.transitions().rows(); ++r) {
    for (Eigen::Index c = 0; c < s.model.transitions().cols(); ++c) s.model.transitions()(r, c) = normal(rng);
  }
  s.model.emissions() = s.model.emissions().unaryExpr([&](double) { return normal(rng); });
  s.features = nehs::FeatureMatrix(static_cast<Eigen::Index>(spec.size()), static_cast<Eigen::Index>(length));
  s.features = s.features.unaryExpr([&](double) { return normal(rng); });
  for (std::size_t i = 0; i < length; ++i) s.tags.push_back(rng() % 7);
  return s;
}

void BM_LogPartition(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nehs::log_partition(s.model, s.features));
}
BENCHMARK(BM_LogPartition)->Arg(10)->Arg(40);

void BM_Viterbi(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nehs::viterbi(s.model, s.features));
}
BENCHMARK(BM_Viterbi)->Arg(10)->Arg(40);

void BM_Gradient(benchmark::State& state) {
  const Setup s = make_setup(static_cast<std::size_t>(state.range(0)));
  nehs::CrfGradient grad(s.model);
  for (auto _ : state) {
    grad.set_zero();
    benchmark::DoNotOptimize(nehs::accumulate_log_likelihood_gradient(s.model, s.features, s.tags, grad));
  }
}
BENCHMARK(BM_Gradient)->Arg(10)->Arg(40);

}  // namespace
