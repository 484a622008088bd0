#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nehs/error.hpp"
#include "nehs/hypersphere.hpp"
#include "nehs/pipeline.hpp"
#include "oracles.hpp"

using namespace nehs;
using namespace nehs::testing;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// One-dimensional universe with items at the given distances from 0.
Universe line_universe(const std::vector<double>& pos, const std::vector<double>& neg) {
  Universe u;
  int i = 0;
  for (double d : pos) u.add("p" + std::to_string(i++), vec({d}), true);
  for (double d : neg) u.add("n" + std::to_string(i++), vec({d}), false);
  return u;
}

}  // namespace

TEST_SUITE("hypersphere") {
  TEST_CASE("euclidean distance examples") {
    CHECK(euclidean_distance(vec({0.3, -0.7}), vec({0.3, -0.7})) == 0.0);
    CHECK(euclidean_distance(vec({1, 0}), vec({0, 1})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(euclidean_distance(vec({1, 2, 3}), vec({4, 6, 3})) == 5.0);
    CHECK_THROWS_AS(euclidean_distance(vec({1, 2}), vec({1, 2, 3})), UsageError);
  }

  TEST_CASE("distance is a metric on random triples") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
      const Vector a = gaussian_vector(16, rng), b = gaussian_vector(16, rng), c = gaussian_vector(16, rng);
      CHECK(euclidean_distance(a, b) == euclidean_distance(b, a));
      CHECK(euclidean_distance(a, c) <= euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-9);
      CHECK(std::abs(euclidean_distance(a, b) - loop_distance(a, b)) < 1e-12);
    }
  }

  TEST_CASE("fit_center") {
    std::vector<Vector> one{vec({3, -1})};
    CHECK(fit_center(one) == vec({3, -1}));
    std::vector<Vector> two{vec({0, 0}), vec({2, 2})};
    CHECK(fit_center(two) == vec({1, 1}));
    std::vector<Vector> three{vec({0, 10}), vec({1, 0}), vec({5, 1})};
    CHECK(fit_center(three, CenterMethod::Median) == vec({1, 1}));
    CHECK_THROWS_AS(fit_center(std::vector<Vector>{}), UsageError);
  }

  TEST_CASE("fit_center mean of Gaussian samples is within the statistical bound") {
    std::mt19937_64 rng(2);
    const Vector mu = gaussian_vector(8, rng);
    std::vector<Vector> xs;
    Vector sum = Vector::Zero(8);
    for (int i = 0; i < 1000; ++i) {
      xs.push_back(mu + gaussian_vector(8, rng, 2.0));
      sum += xs.back();
    }
    const Vector c = fit_center(xs);
    const Vector brute = sum / 1000.0;
    for (int k = 0; k < 8; ++k) {
      CHECK(std::abs(c[k] - mu[k]) < 5.0 * 2.0 / std::sqrt(1000.0));
      CHECK(c[k] == doctest::Approx(brute[k]).epsilon(1e-12));
    }
  }

  TEST_CASE("fit_radius on a separable universe returns the midpoint") {
    const auto u = line_universe({0.1, 0.2, 0.3}, {0.9, 1.0});
    const auto fit = fit_radius(vec({0.0}), u);
    CHECK(fit.radius == doctest::Approx(0.6));
    CHECK(fit.report.f1 == 1.0);
  }

  TEST_CASE("fit_radius covers every item when that maximizes F1") {
    const auto u = line_universe({0.5}, {0.1, 0.2});
    const auto fit = fit_radius(vec({0.0}), u);
    CHECK(fit.report.f1 == doctest::Approx(0.5));
    CHECK(fit.radius > 0.5);
    CHECK(fit.report.predicted_count == 3);
  }

  TEST_CASE("fit_radius needs positives") {
    const auto u = line_universe({}, {0.1});
    CHECK_THROWS_AS(fit_radius(vec({0.0}), u), UsageError);
  }

  TEST_CASE("fit_radius matches the exhaustive threshold oracle") {
    std::mt19937_64 rng(3);
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 30; ++trial) {
      Universe u;
      std::vector<double> dist;
      std::vector<bool> pos;
      const Vector center = gaussian_vector(4, rng);
      for (int i = 0; i < 200; ++i) {
        const Vector v = gaussian_vector(4, rng);
        const bool p = coin(rng) || i == 0;
        u.add("i" + std::to_string(i), v, p);
        dist.push_back(loop_distance(v, center));
        pos.push_back(p);
      }
      const auto fit = fit_radius(center, u, 1 + static_cast<std::size_t>(trial % 3));
      CHECK(fit.report.f1 == exhaustive_best_f1(dist, pos).f1);
      const Hypersphere s{center, fit.radius, NeType::Per};
      CHECK(evaluate(s, u).f1 == fit.report.f1);
    }
  }

  TEST_CASE("fit_radius prefers the smallest radius among ties") {
    // Radius 0.15 gives P=1,G=1 (F1 2/3); any radius past 0.5 gives P=4,G=2 (F1 2/3 as well).
    const auto u = line_universe({0.1, 0.5}, {0.2, 0.3});
    const auto fit = fit_radius(vec({0.0}), u);
    CHECK(fit.radius == doctest::Approx(0.15));
  }

  TEST_CASE("recall is non-decreasing in the radius") {
    std::mt19937_64 rng(4);
    Universe u;
    for (int i = 0; i < 100; ++i) u.add("i" + std::to_string(i), gaussian_vector(3, rng), i % 3 == 0);
    double last = 0.0;
    for (double r = 0.0; r < 5.0; r += 0.05) {
      const auto rep = evaluate({Vector::Zero(3), r, NeType::Per}, u);
      CHECK(rep.recall >= last);
      CHECK(rep.hit_count <= std::min(rep.true_count, rep.predicted_count));
      last = rep.recall;
    }
  }

  TEST_CASE("membership is strict") {
    const Hypersphere s{vec({0, 0}), 0.5, NeType::Per};
    CHECK(contains(s, vec({0, 0})));
    CHECK_FALSE(contains({vec({0, 0}), 1.0, NeType::Per}, vec({0.6, 0.8})));
    CHECK_FALSE(contains({vec({0, 0}), 0.0, NeType::Per}, vec({0, 0})));
    CHECK_THROWS_AS(contains(s, vec({0})), UsageError);
  }

  TEST_CASE("likelihood ranking and membership agree with brute force") {
    std::mt19937_64 rng(5);
    const Hypersphere s{gaussian_vector(6, rng), 2.5, NeType::Loc};
    CHECK(ne_likelihood(s, s.center) == 0.0);
    std::vector<Vector> words;
    for (int i = 0; i < 50; ++i) words.push_back(gaussian_vector(6, rng));
    std::vector<int> by_lib(50), by_oracle(50);
    for (int i = 0; i < 50; ++i) by_lib[i] = by_oracle[i] = i;
    std::stable_sort(by_lib.begin(), by_lib.end(),
                     [&](int a, int b) { return ne_likelihood(s, words[a]) < ne_likelihood(s, words[b]); });
    std::stable_sort(by_oracle.begin(), by_oracle.end(), [&](int a, int b) {
      return loop_distance(words[a], s.center) < loop_distance(words[b], s.center);
    });
    CHECK(by_lib == by_oracle);
    for (const auto& w : words) CHECK(contains(s, w) == (ne_likelihood(s, w) < s.radius));
  }

  TEST_CASE("evaluate counts") {
    const auto u = line_universe({0.1, 0.2, 2.0, 3.0}, {0.3, 0.4, 0.5, 5.0});
    const auto r = evaluate({vec({0.0}), 1.0, NeType::Per}, u);
    CHECK(r.true_count == 4);
    CHECK(r.predicted_count == 5);
    CHECK(r.hit_count == 2);
    CHECK(r.f1 == doctest::Approx(2 * 0.4 * 0.5 / 0.9));
    const auto zero = evaluate({vec({0.0}), 0.0, NeType::Per}, u);
    CHECK(zero.predicted_count == 0);
    CHECK(zero.f1 == 0.0);
  }

  TEST_CASE("universe rejects duplicates and mixed dimensions") {
    Universe u;
    u.add("a", vec({1, 2}), false);
    CHECK_THROWS_AS(u.add("a", vec({1, 2}), true), UsageError);
    CHECK_THROWS_AS(u.add("b", vec({1}), true), UsageError);
    CHECK(u.mark_positive("a"));
    CHECK_FALSE(u.mark_positive("zz"));
    CHECK(u.positive_count() == 1);
  }

  TEST_CASE("pipeline fit adds multi-word entries to the universe") {
    EmbeddingSpace space(1);
    space.add("a", vec({0.1}));
    space.add("b", vec({0.3}));
    space.add("far", vec({5.0}));
    NeDictionary dict;
    dict.entries.push_back({{"a"}, NeType::Per});
    dict.entries.push_back({{"a", "b"}, NeType::Per});
    const auto resolved = resolve(dict, space);
    const auto u = build_universe(space, resolved, NeType::Per);
    CHECK(u.size() == 4);
    CHECK(u.positive_count() == 2);
    const auto fit = fit_hypersphere(space, resolved, NeType::Per);
    CHECK(fit.report.f1 > 0.0);
    CHECK(fit.resolved == 2);
    CHECK_THROWS_AS(fit_hypersphere(space, resolved, NeType::Loc), UsageError);
  }
}
