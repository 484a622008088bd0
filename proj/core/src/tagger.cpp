#include "nehs/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "nehs/error.hpp"
#include "nehs/numeric.hpp"
#include "nehs/parallel.hpp"

namespace nehs {

std::size_t FeatureSpec::size() const {
  return (embedding ? embedding_dim : 0) + (hypersphere ? 3 : 0) + (lexical ? kLexicalFeatures : 0) + 1;
}

std::array<double, kLexicalFeatures> lexical_indicators(std::string_view token) {
  std::array<double, kLexicalFeatures> out{0.0, 0.0, 0.0, 0.0};
  if (token.empty()) return out;
  const auto is_upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  const auto is_alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
  const auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  const auto is_punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };

  out[0] = is_upper(token.front()) ? 1.0 : 0.0;
  const bool any_alpha = std::any_of(token.begin(), token.end(), is_alpha);
  const bool all_upper = std::all_of(token.begin(), token.end(), [&](char c) { return !is_alpha(c) || is_upper(c); });
  out[1] = any_alpha && all_upper ? 1.0 : 0.0;
  out[2] = std::any_of(token.begin(), token.end(), is_digit) ? 1.0 : 0.0;
  out[3] = std::all_of(token.begin(), token.end(), is_punct) ? 1.0 : 0.0;
  return out;
}

FeatureMatrix build_features(std::span<const std::string> sentence, const EmbeddingSpace* space,
                             const FeatureSpec& spec, std::span<const HsFeatureVector> hs, LookupPolicy policy) {
  if (!hs.empty() && hs.size() != sentence.size()) {
    throw UsageError("hypersphere features cover " + std::to_string(hs.size()) + " tokens, sentence has " +
                     std::to_string(sentence.size()));
  }
  if (spec.hypersphere && hs.size() != sentence.size()) {
    throw UsageError("hypersphere block enabled but no hypersphere features supplied");
  }
  if (spec.embedding && space != nullptr && space->dim() != spec.embedding_dim) {
    throw UsageError("embedding space dimension " + std::to_string(space->dim()) +
                     " does not match the feature spec's " + std::to_string(spec.embedding_dim));
  }
  const auto n = static_cast<Eigen::Index>(sentence.size());
  FeatureMatrix features = FeatureMatrix::Zero(static_cast<Eigen::Index>(spec.size()), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& token = sentence[static_cast<std::size_t>(i)];
    Eigen::Index row = 0;
    if (spec.embedding) {
      if (space != nullptr) {
        if (auto idx = find_token(*space, token, policy)) {
          features.col(i).segment(0, static_cast<Eigen::Index>(spec.embedding_dim)) = space->vector(*idx);
        }
      }
      row += static_cast<Eigen::Index>(spec.embedding_dim);
    }
    if (spec.hypersphere) {
      for (double z : hs[static_cast<std::size_t>(i)].z) features(row++, i) = z;
    }
    if (spec.lexical) {
      for (double v : lexical_indicators(token)) features(row++, i) = v;
    }
    features(row, i) = 1.0;
  }
  return features;
}

CrfModel::CrfModel(std::vector<std::string> tags, FeatureSpec spec) : tags_(std::move(tags)), spec_(spec) {
  if (tags_.empty()) throw UsageError("CRF needs at least one tag");
  std::set<std::string> unique(tags_.begin(), tags_.end());
  if (unique.size() != tags_.size()) throw UsageError("CRF tags must be unique");
  const auto k = static_cast<Eigen::Index>(tags_.size());
  transitions_ = Matrix::Zero(k + 1, k + 1);
  emissions_ = Matrix::Zero(k, static_cast<Eigen::Index>(spec_.size()));
}

std::optional<std::size_t> CrfModel::tag_index(std::string_view tag) const {
  auto it = std::find(tags_.begin(), tags_.end(), tag);
  if (it == tags_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - tags_.begin());
}

std::size_t CrfModel::parameter_count() const {
  return static_cast<std::size_t>(transitions_.size() + emissions_.size());
}

namespace {

void check_features(const CrfModel& model, const FeatureMatrix& features) {
  if (features.cols() == 0) throw UsageError("CRF operations need a non-empty sentence");
  if (features.rows() != model.emissions().cols()) {
    throw UsageError("feature vectors have " + std::to_string(features.rows()) + " entries, model expects " +
                     std::to_string(model.emissions().cols()));
  }
}

void check_tags(const CrfModel& model, const FeatureMatrix& features, std::span<const std::size_t> tags) {
  check_features(model, features);
  if (tags.size() != static_cast<std::size_t>(features.cols())) {
    throw UsageError("tag sequence length " + std::to_string(tags.size()) + " does not match sentence length " +
                     std::to_string(features.cols()));
  }
  for (auto t : tags) {
    if (t >= model.num_tags()) throw UsageError("tag index " + std::to_string(t) + " is out of range");
  }
}

// Log-space forward table: alpha(i, j) = log sum over prefixes ending in j.
Matrix forward_table(const CrfModel& model, const Matrix& emit) {
  const auto n = emit.rows();
  const auto k = emit.cols();
  const auto b = static_cast<Eigen::Index>(model.boundary());
  const Matrix& trans = model.transitions();
  Matrix alpha(n, k);
  for (Eigen::Index j = 0; j < k; ++j) alpha(0, j) = trans(b, j) + emit(0, j);
  std::vector<double> terms(static_cast<std::size_t>(k));
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      for (Eigen::Index p = 0; p < k; ++p) terms[static_cast<std::size_t>(p)] = alpha(i - 1, p) + trans(p, j);
      alpha(i, j) = emit(i, j) + log_sum_exp(terms);
    }
  }
  return alpha;
}

double final_log_partition(const CrfModel& model, const Matrix& alpha) {
  const auto n = alpha.rows();
  const auto k = alpha.cols();
  const auto b = static_cast<Eigen::Index>(model.boundary());
  std::vector<double> terms(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) terms[static_cast<std::size_t>(j)] = alpha(n - 1, j) + model.transitions()(j, b);
  return log_sum_exp(terms);
}

}  // namespace

Matrix emission_scores(const CrfModel& model, const FeatureMatrix& features) {
  check_features(model, features);
  return (model.emissions() * features).transpose();
}

double score_sequence(const CrfModel& model, const FeatureMatrix& features, std::span<const std::size_t> tags) {
  check_tags(model, features, tags);
  const auto b = model.boundary();
  const Matrix& trans = model.transitions();
  double score = 0.0;
  std::size_t prev = b;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    score += trans(static_cast<Eigen::Index>(prev), static_cast<Eigen::Index>(tags[i]));
    score += model.emissions().row(static_cast<Eigen::Index>(tags[i])).dot(features.col(static_cast<Eigen::Index>(i)));
    prev = tags[i];
  }
  score += trans(static_cast<Eigen::Index>(prev), static_cast<Eigen::Index>(b));
  return score;
}

double score_sequence(const CrfModel& model, const FeatureMatrix& features, std::span<const std::string> tags) {
  std::vector<std::size_t> indices;
  indices.reserve(tags.size());
  for (const auto& t : tags) {
    auto idx = model.tag_index(t);
    if (!idx) throw UsageError("unknown tag '" + t + "'");
    indices.push_back(*idx);
  }
  return score_sequence(model, features, indices);
}

double log_partition(const CrfModel& model, const FeatureMatrix& features) {
  const Matrix emit = emission_scores(model, features);
  return final_log_partition(model, forward_table(model, emit));
}

double sequence_log_probability(const CrfModel& model, const FeatureMatrix& features,
                                std::span<const std::size_t> tags) {
  return score_sequence(model, features, tags) - log_partition(model, features);
}

std::vector<std::size_t> viterbi(const CrfModel& model, const FeatureMatrix& features) {
  const Matrix emit = emission_scores(model, features);
  const auto n = emit.rows();
  const auto k = emit.cols();
  const auto b = static_cast<Eigen::Index>(model.boundary());
  const Matrix& trans = model.transitions();

  Matrix best(n, k);
  Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic> back(n, k);
  for (Eigen::Index j = 0; j < k; ++j) best(0, j) = trans(b, j) + emit(0, j);
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      Eigen::Index arg = 0;
      double top = best(i - 1, 0) + trans(0, j);
      for (Eigen::Index p = 1; p < k; ++p) {
        const double cand = best(i - 1, p) + trans(p, j);
        if (cand > top) {
          top = cand;
          arg = p;
        }
      }
      best(i, j) = top + emit(i, j);
      back(i, j) = arg;
    }
  }
  Eigen::Index last = 0;
  double top = best(n - 1, 0) + trans(0, b);
  for (Eigen::Index j = 1; j < k; ++j) {
    const double cand = best(n - 1, j) + trans(j, b);
    if (cand > top) {
      top = cand;
      last = j;
    }
  }
  std::vector<std::size_t> path(static_cast<std::size_t>(n));
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    path[static_cast<std::size_t>(i)] = static_cast<std::size_t>(last);
    if (i > 0) last = back(i, last);
  }
  return path;
}

CrfGradient::CrfGradient(const CrfModel& model)
    : transitions(Matrix::Zero(model.transitions().rows(), model.transitions().cols())),
      emissions(Matrix::Zero(model.emissions().rows(), model.emissions().cols())) {}

void CrfGradient::set_zero() {
  transitions.setZero();
  emissions.setZero();
}

CrfGradient& CrfGradient::operator+=(const CrfGradient& other) {
  transitions += other.transitions;
  emissions += other.emissions;
  return *this;
}

double accumulate_log_likelihood_gradient(const CrfModel& model, const FeatureMatrix& features,
                                          std::span<const std::size_t> tags, CrfGradient& grad) {
  check_tags(model, features, tags);
  const Matrix emit = emission_scores(model, features);
  const auto n = emit.rows();
  const auto k = emit.cols();
  const auto b = static_cast<Eigen::Index>(model.boundary());
  const Matrix& trans = model.transitions();

  const Matrix alpha = forward_table(model, emit);
  const double log_z = final_log_partition(model, alpha);

  Matrix beta(n, k);
  for (Eigen::Index j = 0; j < k; ++j) beta(n - 1, j) = trans(j, b);
  std::vector<double> terms(static_cast<std::size_t>(k));
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      for (Eigen::Index q = 0; q < k; ++q) {
        terms[static_cast<std::size_t>(q)] = trans(j, q) + emit(i + 1, q) + beta(i + 1, q);
      }
      beta(i, j) = log_sum_exp(terms);
    }
  }

  // residual(i, j) = observed - expected unary count.
  Matrix residual = -((alpha + beta).array() - log_z).exp().matrix();
  for (Eigen::Index i = 0; i < n; ++i) residual(i, static_cast<Eigen::Index>(tags[static_cast<std::size_t>(i)])) += 1.0;
  grad.emissions.noalias() += residual.transpose() * features.transpose();

  for (Eigen::Index j = 0; j < k; ++j) {
    grad.transitions(b, j) += residual(0, j);
    grad.transitions(j, b) += residual(n - 1, j);
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index p = 0; p < k; ++p) {
      for (Eigen::Index j = 0; j < k; ++j) {
        grad.transitions(p, j) -= std::exp(alpha(i - 1, p) + trans(p, j) + emit(i, j) + beta(i, j) - log_z);
      }
    }
    const auto from = static_cast<Eigen::Index>(tags[static_cast<std::size_t>(i - 1)]);
    const auto to = static_cast<Eigen::Index>(tags[static_cast<std::size_t>(i)]);
    grad.transitions(from, to) += 1.0;
  }

  return score_sequence(model, features, tags) - log_z;
}

double training_objective(const CrfModel& model, std::span<const TrainingInstance> instances, double l2_strength,
                          CrfGradient* grad) {
  double total = 0.0;
  if (grad != nullptr) grad->set_zero();
  for (const auto& inst : instances) {
    if (grad != nullptr) {
      total += accumulate_log_likelihood_gradient(model, inst.features, inst.tags, *grad);
    } else {
      total += sequence_log_probability(model, inst.features, inst.tags);
    }
  }
  total -= l2_strength * (model.transitions().squaredNorm() + model.emissions().squaredNorm());
  if (grad != nullptr) {
    grad->transitions -= 2.0 * l2_strength * model.transitions();
    grad->emissions -= 2.0 * l2_strength * model.emissions();
  }
  return total;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (!(l2_strength >= 0.0)) throw UsageError("l2_strength must be non-negative");
  if (batch_size == 0) throw UsageError("batch_size must be positive");
}

namespace {

double mean_log_likelihood(const CrfModel& model, std::span<const TrainingInstance> instances,
                           std::size_t threads, std::size_t epoch) {
  std::vector<double> ll(instances.size());
  parallel_for(instances.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ll[i] = sequence_log_probability(model, instances[i].features, instances[i].tags);
    }
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < ll.size(); ++i) {
    if (!std::isfinite(ll[i])) {
      throw TrainingError("non-finite log-likelihood after epoch " + std::to_string(epoch) + " on sentence " +
                          std::to_string(i));
    }
    sum += ll[i];
  }
  return sum / static_cast<double>(instances.size());
}

}  // namespace

CrfModel train(CrfModel model, std::span<const TrainingInstance> instances, const TrainConfig& config,
               TrainReport* report) {
  config.validate();
  if (instances.empty()) throw UsageError("cannot train on an empty corpus");

  const std::size_t count = instances.size();
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  const double decay = 2.0 * config.l2_strength / static_cast<double>(count);

  std::vector<CrfGradient> slots(std::min(config.batch_size, count), CrfGradient(model));
  std::vector<double> slot_ll(slots.size());
  CrfGradient step(model);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < count; start += config.batch_size) {
      const std::size_t size = std::min(config.batch_size, count - start);
      parallel_for(size, config.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          slots[s].set_zero();
          const auto& inst = instances[order[start + s]];
          slot_ll[s] = accumulate_log_likelihood_gradient(model, inst.features, inst.tags, slots[s]);
        }
      });
      step.set_zero();
      for (std::size_t s = 0; s < size; ++s) {
        if (!std::isfinite(slot_ll[s])) {
          throw TrainingError("non-finite log-likelihood in epoch " + std::to_string(epoch) + " on sentence " +
                              std::to_string(order[start + s]));
        }
        step += slots[s];
      }
      const double scale = config.learning_rate / static_cast<double>(size);
      model.transitions() += scale * step.transitions - config.learning_rate * decay * model.transitions();
      model.emissions() += scale * step.emissions - config.learning_rate * decay * model.emissions();
      const auto b = static_cast<Eigen::Index>(model.boundary());
      model.transitions()(b, b) = 0.0;
    }
    const double mean_ll = mean_log_likelihood(model, instances, config.threads, epoch);
    if (report != nullptr) report->epoch_mean_log_likelihood.push_back(mean_ll);
  }
  return model;
}

std::vector<TrainingInstance> make_instances(const CrfModel& model, const TaggedCorpus& corpus,
                                             const EmbeddingSpace* space,
                                             std::span<const std::vector<HsFeatureVector>> hs, LookupPolicy policy) {
  const bool use_hs = model.feature_spec().hypersphere;
  if (use_hs && hs.size() != corpus.sentences.size()) {
    throw UsageError("hypersphere features must cover every sentence of the corpus");
  }
  std::vector<TrainingInstance> out;
  out.reserve(corpus.sentences.size());
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    std::span<const HsFeatureVector> rows;
    if (use_hs) rows = hs[s];
    TrainingInstance inst{build_features(corpus.sentences[s], space, model.feature_spec(), rows, policy), {}};
    for (const auto& tag : corpus.tags[s]) {
      auto idx = model.tag_index(tag);
      if (!idx) throw UsageError("tag '" + tag + "' is not known to the model");
      inst.tags.push_back(*idx);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<std::string> decode(const CrfModel& model, const FeatureMatrix& features) {
  std::vector<std::string> out;
  for (auto t : viterbi(model, features)) out.push_back(model.tags()[t]);
  return out;
}

PrfReport score_spans(std::span<const std::vector<std::string>> predicted,
                      std::span<const std::vector<std::string>> gold) {
  if (predicted.size() != gold.size()) throw UsageError("predicted and gold corpora differ in sentence count");
  std::size_t true_count = 0;
  std::size_t predicted_count = 0;
  std::size_t hits = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto gold_spans = extract_spans(gold[s]);
    const auto pred_spans = extract_spans(predicted[s]);
    true_count += gold_spans.size();
    predicted_count += pred_spans.size();
    for (const auto& span : pred_spans) {
      if (std::find(gold_spans.begin(), gold_spans.end(), span) != gold_spans.end()) ++hits;
    }
  }
  return make_prf(true_count, predicted_count, hits);
}

PrfReport evaluate_ner(const CrfModel& model, std::span<const FeatureMatrix> features,
                       std::span<const std::vector<std::string>> gold_tags) {
  if (features.size() != gold_tags.size()) throw UsageError("feature and gold corpora differ in sentence count");
  std::vector<std::vector<std::string>> predicted;
  predicted.reserve(features.size());
  for (const auto& f : features) predicted.push_back(decode(model, f));
  return score_spans(predicted, gold_tags);
}

}  // namespace nehs
