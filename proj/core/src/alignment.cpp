#include "nehs/alignment.hpp"

#include <algorithm>
#include <istream>

#include <Eigen/SVD>

#include "nehs/error.hpp"
#include "nehs/parallel.hpp"
#include "nehs/text_io.hpp"

namespace nehs {

std::string_view to_string(GeneratorInit init) {
  return init == GeneratorInit::Moments ? "moments" : "identity";
}

AlignmentMap procrustes(std::span<const Vector> sources, std::span<const Vector> targets) {
  if (sources.size() != targets.size()) throw UsageError("procrustes: source and target counts differ");
  if (sources.empty()) throw UsageError("procrustes: no pairs");
  const Eigen::Index dim = sources.front().size();
  if (sources.size() < static_cast<std::size_t>(dim)) {
    throw UsageError("procrustes: need at least " + std::to_string(dim) + " pairs, got " +
                     std::to_string(sources.size()));
  }
  Matrix cross = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].size() != dim || targets[i].size() != dim) {
      throw UsageError("procrustes: all vectors must share one dimension");
    }
    cross.noalias() += targets[i] * sources[i].transpose();
  }
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv[0] <= 0.0 || sv[dim - 1] <= sv[0] * 1e-12) {
    throw DegenerateDataError("procrustes: cross-covariance is rank deficient");
  }
  AlignmentMap map;
  map.matrix = svd.matrixU() * svd.matrixV().transpose();
  map.method = "procrustes";
  return map;
}

Vector map_vector(const AlignmentMap& map, VectorView v) {
  if (static_cast<std::size_t>(v.size()) != map.source_dim()) {
    throw UsageError("map_vector: vector has dimension " + std::to_string(v.size()) + ", map expects " +
                     std::to_string(map.source_dim()));
  }
  return map.matrix * v;
}

Hypersphere transform_hypersphere(const AlignmentMap& map, const Hypersphere& sphere,
                                  std::span<const Vector> sample) {
  if (sample.empty()) throw UsageError("transform_hypersphere: empty sample");
  Hypersphere out;
  out.type = sphere.type;
  out.center = map_vector(map, sphere.center);
  std::vector<double> ratios;
  ratios.reserve(sample.size());
  for (const auto& v : sample) {
    const double before = euclidean_distance(v, sphere.center);
    if (before < 1e-12) continue;
    ratios.push_back(euclidean_distance(map_vector(map, v), out.center) / before);
  }
  if (ratios.empty()) throw DegenerateDataError("transform_hypersphere: every sample sits on the center");
  std::sort(ratios.begin(), ratios.end());
  const std::size_t mid = ratios.size() / 2;
  const double median = ratios.size() % 2 == 1 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
  out.radius = sphere.radius * median;
  return out;
}

std::vector<LexiconEntry> parse_lexicon(std::istream& in, std::string_view source_name) {
  std::vector<LexiconEntry> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = io::chomp(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = io::split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw FormatError(std::string(source_name) + ":" + std::to_string(line_no) +
                        ": expected '<source>\\t<target>'");
    }
    out.push_back({std::string(fields[0]), std::string(fields[1])});
  }
  return out;
}

std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  return parse_lexicon(in, path.string());
}

TranslationAccuracy translation_accuracy(const AlignmentMap& map, std::span<const LexiconEntry> lexicon,
                                         const EmbeddingSpace& source, const EmbeddingSpace& target,
                                         std::size_t k, LookupPolicy policy, std::size_t threads) {
  if (k == 0) throw UsageError("translation_accuracy: k must be positive");
  if (map.source_dim() != source.dim() || map.target_dim() != target.dim()) {
    throw UsageError("translation_accuracy: map shape does not match the spaces");
  }
  struct Query {
    std::size_t source;
    std::size_t target;
  };
  std::vector<Query> queries;
  TranslationAccuracy result;
  for (const auto& entry : lexicon) {
    auto s = find_token(source, entry.source, policy);
    auto t = find_token(target, entry.target, policy);
    if (!s || !t) {
      ++result.skipped;
      continue;
    }
    queries.push_back({*s, *t});
  }
  if (queries.empty()) throw UsageError("translation_accuracy: no lexicon pair is resolvable in both spaces");

  const auto targets = target.matrix();
  std::vector<char> hit(queries.size(), 0);
  parallel_for(queries.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      const Vector mapped = map.matrix * source.vector(queries[q].source);
      const Vector scores = (targets.colwise() - mapped).colwise().squaredNorm().transpose();
      const double gold = scores[static_cast<Eigen::Index>(queries[q].target)];
      std::size_t closer = 0;
      for (Eigen::Index j = 0; j < scores.size() && closer < k; ++j) {
        if (scores[j] < gold) ++closer;
      }
      hit[q] = closer < k ? 1 : 0;
    }
  });
  result.evaluated = queries.size();
  const auto hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  result.accuracy = static_cast<double>(hits) / static_cast<double>(queries.size());
  return result;
}

}  // namespace nehs
