#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nehs/embeddings.hpp"
#include "nehs/hypersphere.hpp"
#include "nehs/types.hpp"

namespace nehs {

// One sphere per concrete entity type, indexed by type_slot().
struct SphereSet {
  std::array<Hypersphere, 3> spheres;

  const Hypersphere& of(NeType type) const { return spheres[type_slot(type)]; }

  // Picks the Per, Loc and Org spheres out of `spheres`. Throws UsageError if
  // one is missing or listed twice.
  static SphereSet from(std::span<const Hypersphere> spheres);
};

struct TypeStats {
  double mean = 0.0;
  double stddev = 0.0;
};

struct HypersphereStats {
  std::array<TypeStats, 3> by_type;

  const TypeStats& of(NeType type) const { return by_type[type_slot(type)]; }
};

struct HsFeatureVector {
  std::array<double, 3> z{0.0, 0.0, 0.0};  // Per, Loc, Org

  double of(NeType type) const { return z[type_slot(type)]; }
};

// Population mean and standard deviation (divisor N) of the distance from
// every vocabulary vector to each sphere's center.
HypersphereStats compute_stats(const EmbeddingSpace& space, const SphereSet& spheres,
                               std::size_t threads = 1);

// z = (ED(v, center_type) - mean_type) / stddev_type for each type.
HsFeatureVector featurize(VectorView v, const SphereSet& spheres, const HypersphereStats& stats);

struct FeatureRow {
  std::size_t sentence = 0;
  std::size_t token_index = 0;
  std::string token;
  HsFeatureVector features;
};

using FeatureTable = std::vector<FeatureRow>;

// One row per corpus token. Tokens missing from the space get (0, 0, 0), the
// population mean.
FeatureTable featurize_corpus(std::span<const std::vector<std::string>> sentences,
                              const EmbeddingSpace& space, const SphereSet& spheres,
                              const HypersphereStats& stats, LookupPolicy policy = {});

// TSV with header `sentence_idx token_idx token z_per z_loc z_org`.
void write_feature_table(const FeatureTable& table, std::ostream& out);
void save_feature_table(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable parse_feature_table(std::istream& in, std::string_view source_name);
FeatureTable load_feature_table(const std::filesystem::path& path);

// Regroups table rows into per-sentence feature lists. Throws FormatError if
// the rows do not cover exactly `sentence_lengths`.
std::vector<std::vector<HsFeatureVector>> group_by_sentence(const FeatureTable& table,
                                                            std::span<const std::size_t> sentence_lengths);

}  // namespace nehs
