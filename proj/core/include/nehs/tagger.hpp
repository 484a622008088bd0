#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nehs/corpus.hpp"
#include "nehs/embeddings.hpp"
#include "nehs/features.hpp"
#include "nehs/prf.hpp"
#include "nehs/types.hpp"

namespace nehs {

// Which blocks make up a token's feature vector, in this order:
// embedding (embedding_dim) | hypersphere z-scores (3) | lexical (4) | bias (1).
struct FeatureSpec {
  bool embedding = true;
  std::size_t embedding_dim = 0;
  bool hypersphere = false;
  bool lexical = true;

  std::size_t size() const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

inline constexpr std::size_t kLexicalFeatures = 4;

// One column per token.
using FeatureMatrix = Matrix;

// Feature columns for a sentence. `hs` must be parallel to `sentence` when
// the hypersphere block is enabled and is ignored otherwise.
FeatureMatrix build_features(std::span<const std::string> sentence, const EmbeddingSpace* space,
                             const FeatureSpec& spec, std::span<const HsFeatureVector> hs = {},
                             LookupPolicy policy = {});

// initial-capital, all-caps, contains-digit, all-punctuation
std::array<double, kLexicalFeatures> lexical_indicators(std::string_view token);

// Linear-chain CRF with linear emission scores.
//
// transitions() is (K+1) x (K+1) for K tags. Index K is the virtual
// boundary tag: row K holds start -> tag scores, column K holds
// tag -> stop scores, and entry (K, K) is unused and kept at zero.
// emissions() is K x F; the emission score of tag j at token i is
// emissions().row(j) . features.col(i).
class CrfModel {
 public:
  CrfModel(std::vector<std::string> tags, FeatureSpec spec);

  std::size_t num_tags() const { return tags_.size(); }
  std::size_t boundary() const { return tags_.size(); }
  const std::vector<std::string>& tags() const { return tags_; }
  std::optional<std::size_t> tag_index(std::string_view tag) const;

  const FeatureSpec& feature_spec() const { return spec_; }

  Matrix& transitions() { return transitions_; }
  const Matrix& transitions() const { return transitions_; }
  Matrix& emissions() { return emissions_; }
  const Matrix& emissions() const { return emissions_; }

  std::size_t parameter_count() const;

 private:
  std::vector<std::string> tags_;
  FeatureSpec spec_;
  Matrix transitions_;
  Matrix emissions_;
};

// Emission score table L (n x K) for a sentence.
Matrix emission_scores(const CrfModel& model, const FeatureMatrix& features);

// s(x, y): boundary -> y_1, y_i -> y_{i+1}, y_n -> boundary transitions plus
// emissions. Throws UsageError on length mismatch or unknown tag.
double score_sequence(const CrfModel& model, const FeatureMatrix& features,
                      std::span<const std::size_t> tags);
double score_sequence(const CrfModel& model, const FeatureMatrix& features,
                      std::span<const std::string> tags);

// log sum_y exp s(x, y) by the forward recursion.
double log_partition(const CrfModel& model, const FeatureMatrix& features);

double sequence_log_probability(const CrfModel& model, const FeatureMatrix& features,
                                std::span<const std::size_t> tags);

// Highest-scoring tag sequence; ties go to the lowest tag index.
std::vector<std::size_t> viterbi(const CrfModel& model, const FeatureMatrix& features);

struct CrfGradient {
  Matrix transitions;
  Matrix emissions;

  explicit CrfGradient(const CrfModel& model);
  void set_zero();
  CrfGradient& operator+=(const CrfGradient& other);
};

// Adds d/dtheta log p(y | x) to `grad` (observed minus expected counts from
// forward-backward) and returns log p(y | x).
double accumulate_log_likelihood_gradient(const CrfModel& model, const FeatureMatrix& features,
                                          std::span<const std::size_t> tags, CrfGradient& grad);

struct TrainingInstance {
  FeatureMatrix features;
  std::vector<std::size_t> tags;
};

// J(theta) = sum_i log p(y_i | x_i) - l2 * ||theta||^2. When `grad` is
// non-null it receives dJ/dtheta.
double training_objective(const CrfModel& model, std::span<const TrainingInstance> instances,
                          double l2_strength, CrfGradient* grad = nullptr);

struct TrainConfig {
  std::size_t epochs = 10;
  double learning_rate = 0.05;
  double l2_strength = 1e-4;
  std::uint64_t seed = 0;
  bool shuffle = true;
  std::size_t batch_size = 8;
  std::size_t threads = 1;

  void validate() const;
};

struct TrainReport {
  // Mean log-likelihood over the training set after each epoch.
  std::vector<double> epoch_mean_log_likelihood;
};

// Minibatch gradient ascent on J / N. Per-sentence gradients may be computed
// on worker threads; they are summed in a fixed order, so results do not
// depend on `threads`. Throws TrainingError on a non-finite value.
CrfModel train(CrfModel model, std::span<const TrainingInstance> instances, const TrainConfig& config,
               TrainReport* report = nullptr);

// Converts a corpus into training instances. `hs` is required (parallel to
// the corpus) when the model's hypersphere block is enabled. Gold tags unknown
// to the model raise UsageError.
std::vector<TrainingInstance> make_instances(const CrfModel& model, const TaggedCorpus& corpus,
                                             const EmbeddingSpace* space,
                                             std::span<const std::vector<HsFeatureVector>> hs = {},
                                             LookupPolicy policy = {});

std::vector<std::string> decode(const CrfModel& model, const FeatureMatrix& features);

// Exact span-and-type matching of Viterbi output against the gold tags.
PrfReport evaluate_ner(const CrfModel& model, std::span<const FeatureMatrix> features,
                       std::span<const std::vector<std::string>> gold_tags);

// Entity-level scores of predicted tag sequences against gold ones.
PrfReport score_spans(std::span<const std::vector<std::string>> predicted,
                      std::span<const std::vector<std::string>> gold);

std::string to_json(const CrfModel& model);
CrfModel crf_from_json(std::string_view json);
void save_crf(const CrfModel& model, const std::filesystem::path& path);
CrfModel load_crf(const std::filesystem::path& path);

}  // namespace nehs
