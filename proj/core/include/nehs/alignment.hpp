#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nehs/embeddings.hpp"
#include "nehs/hypersphere.hpp"
#include "nehs/types.hpp"

namespace nehs {

// Linear map from a source embedding space into a target space.
struct AlignmentMap {
  Matrix matrix;  // target_dim x source_dim
  std::string source_tag;
  std::string target_tag;
  std::string method;
  std::size_t iterations = 0;
  double final_critic_loss = 0.0;

  std::size_t source_dim() const { return static_cast<std::size_t>(matrix.cols()); }
  std::size_t target_dim() const { return static_cast<std::size_t>(matrix.rows()); }
};

// Starting point of the generator.
//   Identity: identity, zero-padded when the dimensions differ.
//   Moments:  maps the source principal axes onto the target principal axes,
//             with each axis sign chosen so the projected third moments agree.
enum class GeneratorInit { Identity, Moments };

std::string_view to_string(GeneratorInit init);

// Wasserstein-GAN settings. The critic is a one-hidden-layer ReLU network
// whose weights are clipped to [-clip_value, clip_value]; both players use
// RMSProp steps.
struct AdversarialConfig {
  std::size_t critic_hidden_size = 500;
  double clip_value = 0.01;
  std::size_t steps = 20000;
  std::size_t critic_steps_per_generator_step = 5;
  double learning_rate = 1e-4;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  bool normalize_inputs = false;
  // Strength beta of the update M <- (1 + beta) M - beta (M M^T) M applied
  // after every generator step. 0 disables it.
  double orthogonality = 0.0;
  GeneratorInit init = GeneratorInit::Identity;

  // Throws UsageError for non-positive sizes or rates.
  void validate() const;
};

struct AdversarialProgress {
  std::size_t step = 0;
  double critic_estimate = 0.0;  // E[D(target)] - E[D(G source)]
};

// Alternating WGAN training of the linear generator. Deterministic for a
// fixed config, seed and input ordering. `on_progress`, when set, is called
// every `progress_every` generator steps.
AlignmentMap train_adversarial(const EmbeddingSpace& source, const EmbeddingSpace& target,
                               const AdversarialConfig& config,
                               const std::function<void(const AdversarialProgress&)>& on_progress = {},
                               std::size_t progress_every = 1000);

// Generator initialization for the given spaces, exactly as training would
// start from it.
Matrix initial_generator(const EmbeddingSpace& source, const EmbeddingSpace& target,
                         const AdversarialConfig& config);

// Orthogonal least-squares map taking sources onto targets: with
// C = sum t s^T = U S V^T, the result is U V^T.
AlignmentMap procrustes(std::span<const Vector> sources, std::span<const Vector> targets);

Vector map_vector(const AlignmentMap& map, VectorView v);

// Center goes through the map; the radius is scaled by the median over the
// sample of |M v - M c| / |v - c| (samples closer than 1e-12 to the center
// are skipped).
Hypersphere transform_hypersphere(const AlignmentMap& map, const Hypersphere& sphere,
                                  std::span<const Vector> sample);

struct LexiconEntry {
  std::string source;
  std::string target;
};

// TSV `source_token <TAB> target_token`.
std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path);
std::vector<LexiconEntry> parse_lexicon(std::istream& in, std::string_view source_name);

struct TranslationAccuracy {
  double accuracy = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

// Fraction of resolvable lexicon pairs whose mapped source vector has the
// gold target among its k Euclidean nearest neighbours in the target space.
// The gold word is outranked only by strictly closer words.
TranslationAccuracy translation_accuracy(const AlignmentMap& map, std::span<const LexiconEntry> lexicon,
                                         const EmbeddingSpace& source, const EmbeddingSpace& target,
                                         std::size_t k, LookupPolicy policy = {},
                                         std::size_t threads = 1);

// {source_tag, target_tag, rows, cols, matrix: row-major array, ...}
std::string to_json(const AlignmentMap& map);
AlignmentMap alignment_from_json(std::string_view json);
void save_alignment(const AlignmentMap& map, const std::filesystem::path& path);
AlignmentMap load_alignment(const std::filesystem::path& path);

}  // namespace nehs
