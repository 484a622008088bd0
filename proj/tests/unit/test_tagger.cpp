#include <doctest.h>

#include <cmath>
#include <random>

#include "nehs/error.hpp"
#include "nehs/tagger.hpp"
#include "oracles.hpp"

using namespace nehs;
using namespace nehs::testing;

namespace {

std::vector<std::string> tag_names(std::size_t k) {
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < k; ++i) tags.push_back("T" + std::to_string(i));
  return tags;
}

// Bias-only spec extended by `extra` embedding dimensions.
FeatureSpec plain_spec(std::size_t extra) {
  FeatureSpec spec;
  spec.embedding = extra > 0;
  spec.embedding_dim = extra;
  spec.lexical = false;
  return spec;
}

struct Instance {
  CrfModel model;
  FeatureMatrix x;
};

Instance random_instance(std::size_t n, std::size_t k, std::mt19937_64& rng, std::size_t features = 3) {
  CrfModel model(tag_names(k), plain_spec(features - 1));
  randomize(model, rng);
  FeatureMatrix x = gaussian_matrix(static_cast<Eigen::Index>(features), static_cast<Eigen::Index>(n), rng);
  x.row(static_cast<Eigen::Index>(features - 1)).setOnes();
  return {std::move(model), std::move(x)};
}

}  // namespace

TEST_SUITE("tagger") {
  TEST_CASE("feature layout") {
    EmbeddingSpace space(3);
    space.add("paris", Vector::Constant(3, 0.5));
    FeatureSpec spec;
    spec.embedding_dim = 3;
    const std::vector<std::string> sent{"Paris", "NATO", "x9", ",", "paris"};
    const auto f = build_features(sent, &space, spec);
    CHECK(f.rows() == 3 + 4 + 1);
    CHECK(f.col(0).head(3) == Vector::Zero(3));
    CHECK(f.col(4).head(3) == Vector::Constant(3, 0.5));
    CHECK(f(3, 0) == 1.0);  // initial capital
    CHECK(f(4, 0) == 0.0);
    CHECK(f(4, 1) == 1.0);  // all caps
    CHECK(f(5, 2) == 1.0);  // digit
    CHECK(f(6, 3) == 1.0);  // punctuation
    CHECK(f.row(7) == Eigen::RowVectorXd::Ones(5));

    spec.hypersphere = true;
    std::vector<HsFeatureVector> hs(5);
    hs[1].z = {1, 2, 3};
    const auto g = build_features(sent, &space, spec, hs);
    CHECK(g.rows() == 3 + 3 + 4 + 1);
    CHECK(g(4, 1) == 2.0);
    std::vector<HsFeatureVector> short_hs(2);
    CHECK_THROWS_AS(build_features(sent, &space, spec, short_hs), UsageError);
  }

  TEST_CASE("hypersphere block disabled ignores the supplied features") {
    std::mt19937_64 rng(1);
    FeatureSpec spec = plain_spec(0);
    spec.lexical = true;
    const std::vector<std::string> sent{"A", "b"};
    std::vector<HsFeatureVector> hs(2);
    hs[0].z = {9, 9, 9};
    CHECK(build_features(sent, nullptr, spec, hs) == build_features(sent, nullptr, spec));
  }

  TEST_CASE("score_sequence examples") {
    CrfModel model({"A", "B"}, plain_spec(0));
    FeatureMatrix x = FeatureMatrix::Ones(1, 1);
    const std::vector<std::size_t> a{0};
    CHECK(score_sequence(model, x, a) == 0.0);
    model.emissions()(0, 0) = 2.0;
    model.transitions()(2, 0) = 0.5;
    model.transitions()(0, 2) = 0.25;
    CHECK(score_sequence(model, x, a) == 2.75);
    const std::vector<std::string> named{"A"};
    CHECK(score_sequence(model, x, named) == 2.75);
    const std::vector<std::string> bad{"C"};
    CHECK_THROWS_AS(score_sequence(model, x, bad), UsageError);
    const std::vector<std::size_t> too_long{0, 0};
    CHECK_THROWS_AS(score_sequence(model, x, too_long), UsageError);
  }

  TEST_CASE("score_sequence matches a loop oracle") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
      auto inst = random_instance(5, 3, rng);
      std::vector<std::size_t> y(5);
      for (auto& v : y) v = rng() % 3;
      CHECK(std::abs(score_sequence(inst.model, inst.x, y) - loop_score(inst.model, inst.x, y)) < 1e-12);
    }
  }

  TEST_CASE("log partition of uniform models") {
    CrfModel model({"A", "B"}, plain_spec(0));
    CHECK(log_partition(model, FeatureMatrix::Ones(1, 1)) == doctest::Approx(std::log(2.0)));
    CHECK(log_partition(model, FeatureMatrix::Ones(1, 2)) == doctest::Approx(std::log(4.0)));
    const std::vector<std::size_t> y{1};
    CHECK(sequence_log_probability(model, FeatureMatrix::Ones(1, 1), y) == doctest::Approx(std::log(0.5)));
  }

  TEST_CASE("log partition and probabilities match enumeration") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 25; ++t) {
      auto inst = random_instance(4, 3, rng);
      const double z = log_partition(inst.model, inst.x);
      CHECK(std::abs(z - brute_log_partition(inst.model, inst.x)) < 1e-8);
      double total = 0.0;
      for_each_sequence(4, 3, [&](const auto& y) {
        const double lp = sequence_log_probability(inst.model, inst.x, y);
        CHECK(lp <= 0.0);
        CHECK(z >= score_sequence(inst.model, inst.x, y));
        total += std::exp(lp);
      });
      CHECK(std::abs(total - 1.0) < 1e-9);
    }
  }

  TEST_CASE("viterbi tie-break and dominance") {
    CrfModel model(tag_names(3), plain_spec(0));
    CHECK(viterbi(model, FeatureMatrix::Ones(1, 4)) == std::vector<std::size_t>{0, 0, 0, 0});
    model.transitions()(3, 2) = 10.0;
    model.transitions()(2, 1) = 10.0;
    model.transitions()(1, 1) = 10.0;
    CHECK(viterbi(model, FeatureMatrix::Ones(1, 3)) == std::vector<std::size_t>{2, 1, 1});
  }

  TEST_CASE("viterbi matches the enumerated argmax") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
      auto inst = random_instance(5, 3, rng);
      const auto best = brute_argmax(inst.model, inst.x);
      const auto path = viterbi(inst.model, inst.x);
      CHECK(path == best.path);
      CHECK(loop_score(inst.model, inst.x, path) == best.score);
    }
  }

  TEST_CASE("a constant emission shift moves log Z by the constant") {
    std::mt19937_64 rng(5);
    auto inst = random_instance(4, 3, rng, 4);
    inst.model.emissions().col(0).setOnes();
    const double z = log_partition(inst.model, inst.x);
    const auto path = viterbi(inst.model, inst.x);
    FeatureMatrix shifted = inst.x;
    shifted(0, 2) += 3.5;
    CHECK(std::abs(log_partition(inst.model, shifted) - (z + 3.5)) < 1e-12);
    CHECK(viterbi(inst.model, shifted) == path);
  }

  TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
      auto inst = random_instance(3, 3, rng);
      const std::vector<std::size_t> y{rng() % 3, rng() % 3, rng() % 3};
      CrfGradient grad(inst.model);
      accumulate_log_likelihood_gradient(inst.model, inst.x, y, grad);
      const auto fd = finite_difference_gradient(
          inst.model, [&](const CrfModel& m) { return sequence_log_probability(m, inst.x, y); });
      CHECK((grad.transitions - fd.transitions).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((grad.emissions - fd.emissions).cwiseAbs().maxCoeff() < 1e-6);
    }
  }

  TEST_CASE("objective gradient including L2 matches finite differences") {
    std::mt19937_64 rng(7);
    auto inst = random_instance(3, 3, rng);
    std::vector<TrainingInstance> data{{inst.x, {0, 2, 1}}, {inst.x.leftCols(2), {1, 1}}};
    CrfGradient grad(inst.model);
    training_objective(inst.model, data, 0.3, &grad);
    const auto fd = finite_difference_gradient(inst.model,
                                               [&](const CrfModel& m) { return training_objective(m, data, 0.3); });
    CHECK((grad.transitions - fd.transitions).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((grad.emissions - fd.emissions).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("training on a separable corpus") {
    // The tag equals the value of one binary feature.
    std::mt19937_64 rng(8);
    CrfModel model({"O", "B-X"}, plain_spec(1));
    std::vector<TrainingInstance> data;
    for (int s = 0; s < 60; ++s) {
      TrainingInstance inst{FeatureMatrix::Ones(2, 6), {}};
      for (int i = 0; i < 6; ++i) {
        const bool on = rng() % 2 == 0;
        inst.features(0, i) = on ? 1.0 : 0.0;
        inst.tags.push_back(on ? 1 : 0);
      }
      data.push_back(std::move(inst));
    }
    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK(train(model, data, cfg).emissions() == model.emissions());

    cfg.epochs = 15;
    cfg.learning_rate = 0.5;
    TrainReport report;
    const auto trained = train(model, data, cfg, &report);
    REQUIRE(report.epoch_mean_log_likelihood.size() == 15);
    CHECK(report.epoch_mean_log_likelihood[1] >= report.epoch_mean_log_likelihood[0]);
    CHECK(report.epoch_mean_log_likelihood[2] >= report.epoch_mean_log_likelihood[1]);
    std::size_t correct = 0;
    std::size_t total = 0;
    for (const auto& inst : data) {
      const auto path = viterbi(trained, inst.features);
      for (std::size_t i = 0; i < path.size(); ++i) correct += path[i] == inst.tags[i] ? 1 : 0;
      total += path.size();
    }
    CHECK(correct == total);

    cfg.threads = 3;
    const auto threaded = train(model, data, cfg);
    CHECK(threaded.emissions() == trained.emissions());
    CHECK(threaded.transitions() == trained.transitions());
  }

  TEST_CASE("training errors") {
    CrfModel model({"O", "B-X"}, plain_spec(0));
    CHECK_THROWS_AS(train(model, std::vector<TrainingInstance>{}, TrainConfig{}), UsageError);
    std::vector<TrainingInstance> data{{FeatureMatrix::Constant(1, 3, 1e300), {1, 0, 1}}};
    TrainConfig cfg;
    cfg.learning_rate = 1e300;
    CHECK_THROWS_AS(train(model, data, cfg), TrainingError);
    cfg.learning_rate = -1.0;
    CHECK_THROWS_AS(train(model, data, cfg), UsageError);
  }

  TEST_CASE("entity-level evaluation") {
    const std::vector<std::vector<std::string>> gold{{"B-PER", "I-PER", "O", "B-LOC"}};
    CHECK(score_spans(gold, gold).f1 == 1.0);
    const std::vector<std::vector<std::string>> none{{"O", "O", "O", "O"}};
    CHECK(score_spans(none, gold).recall == 0.0);
    CHECK(score_spans(none, gold).f1 == 0.0);
    const std::vector<std::vector<std::string>> half{{"B-PER", "I-PER", "B-ORG", "O"}};
    const auto r = score_spans(half, gold);
    CHECK(r.precision == 0.5);
    CHECK(r.recall == 0.5);
    CHECK(r.f1 == 0.5);
  }

  TEST_CASE("make_instances and decode") {
    TaggedCorpus corpus;
    corpus.sentences = {{"Rome", "is"}, {"big"}};
    corpus.tags = {{"B-LOC", "O"}, {"O"}};
    finalize_corpus(corpus);
    CrfModel model(corpus.tag_set, plain_spec(0));
    const auto inst = make_instances(model, corpus, nullptr);
    REQUIRE(inst.size() == 2);
    CHECK(inst[0].tags == std::vector<std::size_t>{1, 0});
    CHECK(decode(model, inst[0].features) == std::vector<std::string>{"O", "O"});
    CrfModel other({"O"}, plain_spec(0));
    CHECK_THROWS_AS(make_instances(other, corpus, nullptr), UsageError);
    FeatureSpec hs = plain_spec(0);
    hs.hypersphere = true;
    CHECK_THROWS_AS(make_instances(CrfModel(corpus.tag_set, hs), corpus, nullptr), UsageError);
  }

  TEST_CASE("model construction") {
    CHECK_THROWS_AS(CrfModel({}, plain_spec(0)), UsageError);
    CHECK_THROWS_AS(CrfModel({"A", "A"}, plain_spec(0)), UsageError);
    CrfModel m({"A", "B", "C"}, plain_spec(4));
    CHECK(m.transitions().rows() == 4);
    CHECK(m.emissions().cols() == 5);
    CHECK(m.parameter_count() == 16 + 15);
  }
}
