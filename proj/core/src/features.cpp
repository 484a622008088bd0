#include "nehs/features.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "nehs/error.hpp"
#include "nehs/numeric.hpp"
#include "nehs/parallel.hpp"
#include "nehs/text_io.hpp"

namespace nehs {

SphereSet SphereSet::from(std::span<const Hypersphere> spheres) {
  SphereSet set;
  std::array<bool, 3> seen{false, false, false};
  for (const auto& s : spheres) {
    if (s.type == NeType::All) continue;
    const std::size_t slot = type_slot(s.type);
    if (seen[slot]) throw UsageError("more than one " + std::string(to_string(s.type)) + " sphere");
    seen[slot] = true;
    set.spheres[slot] = s;
  }
  for (NeType t : kEntityTypes) {
    if (!seen[type_slot(t)]) throw UsageError("missing " + std::string(to_string(t)) + " sphere");
  }
  const auto dim = set.spheres[0].center.size();
  for (const auto& s : set.spheres) {
    if (s.center.size() != dim) throw UsageError("sphere centers have mixed dimensions");
  }
  return set;
}

HypersphereStats compute_stats(const EmbeddingSpace& space, const SphereSet& spheres, std::size_t threads) {
  if (space.size() < 2) throw UsageError("compute_stats needs a vocabulary of at least two words");
  for (const auto& s : spheres.spheres) {
    if (static_cast<std::size_t>(s.center.size()) != space.dim()) {
      throw UsageError("sphere dimension does not match the embedding space");
    }
  }
  HypersphereStats stats;
  std::vector<double> dist(space.size());
  for (NeType type : kEntityTypes) {
    const Vector& center = spheres.of(type).center;
    parallel_for(space.size(), threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) dist[i] = euclidean_distance(space.vector(i), center);
    });
    // Welford's single pass.
    double mean = 0.0;
    double m2 = 0.0;
    double n = 0.0;
    for (double d : dist) {
      n += 1.0;
      const double delta = d - mean;
      mean += delta / n;
      m2 += delta * (d - mean);
    }
    const double stddev = std::sqrt(m2 / n);
    if (!(stddev > 1e-12 * std::max(1.0, std::abs(mean)))) {
      throw DegenerateDataError("every word is equidistant from the " + std::string(to_string(type)) +
                                " center; z-scores are undefined");
    }
    stats.by_type[type_slot(type)] = {mean, stddev};
  }
  return stats;
}

HsFeatureVector featurize(VectorView v, const SphereSet& spheres, const HypersphereStats& stats) {
  HsFeatureVector out;
  for (NeType type : kEntityTypes) {
    const auto& st = stats.of(type);
    out.z[type_slot(type)] = (euclidean_distance(v, spheres.of(type).center) - st.mean) / st.stddev;
  }
  return out;
}

FeatureTable featurize_corpus(std::span<const std::vector<std::string>> sentences, const EmbeddingSpace& space,
                              const SphereSet& spheres, const HypersphereStats& stats, LookupPolicy policy) {
  FeatureTable table;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (std::size_t t = 0; t < sentences[s].size(); ++t) {
      FeatureRow row{s, t, sentences[s][t], {}};
      if (auto idx = find_token(space, row.token, policy)) {
        row.features = featurize(space.vector(*idx), spheres, stats);
      }
      table.push_back(std::move(row));
    }
  }
  return table;
}

void write_feature_table(const FeatureTable& table, std::ostream& out) {
  out << "sentence_idx\ttoken_idx\ttoken\tz_per\tz_loc\tz_org\n";
  for (const auto& row : table) {
    out << row.sentence << '\t' << row.token_index << '\t' << row.token;
    for (double z : row.features.z) out << '\t' << format_double(z);
    out << '\n';
  }
}

void save_feature_table(const FeatureTable& table, const std::filesystem::path& path) {
  auto out = io::open_output(path);
  write_feature_table(table, out);
  if (!out) throw IoError("failed writing " + path.string());
}

FeatureTable parse_feature_table(std::istream& in, std::string_view source_name) {
  const std::string where(source_name);
  FeatureTable table;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = io::chomp(raw);
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("sentence_idx")) continue;
    const auto fields = io::split(line, '\t');
    const std::string at = where + ":" + std::to_string(line_no);
    if (fields.size() != 6) throw FormatError(at + ": expected 6 tab-separated columns");
    FeatureRow row;
    row.token = std::string(fields[2]);
    bool ok = io::parse_size(fields[0], row.sentence) && io::parse_size(fields[1], row.token_index);
    for (std::size_t k = 0; k < 3; ++k) ok = ok && io::parse_double(fields[3 + k], row.features.z[k]);
    if (!ok) throw FormatError(at + ": malformed feature row");
    for (double z : row.features.z) {
      if (!std::isfinite(z)) throw FormatError(at + ": non-finite feature");
    }
    table.push_back(std::move(row));
  }
  return table;
}

FeatureTable load_feature_table(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_feature_table(in, path.string());
}

std::vector<std::vector<HsFeatureVector>> group_by_sentence(const FeatureTable& table,
                                                            std::span<const std::size_t> sentence_lengths) {
  std::vector<std::vector<HsFeatureVector>> out(sentence_lengths.size());
  for (std::size_t s = 0; s < sentence_lengths.size(); ++s) out[s].resize(sentence_lengths[s]);
  std::size_t filled = 0;
  std::vector<std::vector<char>> seen(sentence_lengths.size());
  for (std::size_t s = 0; s < sentence_lengths.size(); ++s) seen[s].assign(sentence_lengths[s], 0);
  for (const auto& row : table) {
    if (row.sentence >= out.size() || row.token_index >= out[row.sentence].size()) {
      throw FormatError("feature row (" + std::to_string(row.sentence) + ", " + std::to_string(row.token_index) +
                        ") is outside the corpus");
    }
    if (seen[row.sentence][row.token_index]) throw FormatError("duplicate feature row");
    seen[row.sentence][row.token_index] = 1;
    out[row.sentence][row.token_index] = row.features;
    ++filled;
  }
  std::size_t expected = 0;
  for (auto n : sentence_lengths) expected += n;
  if (filled != expected) {
    throw FormatError("feature table has " + std::to_string(filled) + " rows, corpus has " +
                      std::to_string(expected) + " tokens");
  }
  return out;
}

}  // namespace nehs
