#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nehs/types.hpp"

namespace nehs {

// Vocabulary-indexed table of dense word vectors for one language.
//
// Vectors are stored contiguously, one column per token, so the whole table
// can be viewed as a dim x size matrix. The space is filled once (by the
// loader or by add()) and then shared read-only; const access is safe from
// any number of threads.
class EmbeddingSpace {
 public:
  explicit EmbeddingSpace(std::size_t dim, std::string language_tag = {});

  // Appends `token`. Returns false and bumps duplicate_count() if the token
  // is already present (the first occurrence wins). Throws FormatError when
  // the vector has the wrong length or a non-finite component.
  bool add(std::string token, VectorView vector);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  const std::string& language_tag() const { return language_tag_; }
  void set_language_tag(std::string tag) { language_tag_ = std::move(tag); }

  std::size_t duplicate_count() const { return duplicates_; }

  std::optional<std::size_t> index_of(std::string_view token) const;
  const std::string& token(std::size_t index) const { return tokens_[index]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  Eigen::Map<const Vector> vector(std::size_t index) const {
    return Eigen::Map<const Vector>(values_.data() + index * dim_, static_cast<Eigen::Index>(dim_));
  }

  // dim x size view over every stored vector.
  Eigen::Map<const Matrix> matrix() const {
    return Eigen::Map<const Matrix>(values_.data(), static_cast<Eigen::Index>(dim_),
                                    static_cast<Eigen::Index>(tokens_.size()));
  }

  void reserve(std::size_t count);

 private:
  std::size_t dim_;
  std::string language_tag_;
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t duplicates_ = 0;
};

// Reads the text embedding format: a `<count> <dim>` header followed by one
// `token v1 ... vdim` row per entry. At most `limit` unique entries are kept.
EmbeddingSpace load_embeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> limit = std::nullopt);
EmbeddingSpace parse_embeddings(std::istream& in, std::string_view source_name,
                                std::optional<std::size_t> limit = std::nullopt);

// Writes `space` in the text format with round-trip exact decimals.
void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path);
void write_embeddings(const EmbeddingSpace& space, std::ostream& out);

struct LookupPolicy {
  // Retry with the ASCII-lowercased token when the exact token is missing.
  bool lowercase_fallback = false;
};

std::optional<std::size_t> find_token(const EmbeddingSpace& space, std::string_view token,
                                      LookupPolicy policy = {});
std::optional<Vector> lookup(const EmbeddingSpace& space, std::string_view token,
                             LookupPolicy policy = {});

struct PhraseVector {
  std::optional<Vector> value;  // absent when no member token was found
  std::size_t skipped = 0;      // member tokens missing from the space
};

// Componentwise mean of the vectors of the member tokens found in `space`.
PhraseVector phrase_vector(const EmbeddingSpace& space, std::span<const std::string> tokens,
                           LookupPolicy policy = {});

struct LabeledPoint {
  std::string token;
  std::string label;
  Vector vector;
};

struct ProjectedRow {
  std::string token;
  std::string label;
  std::vector<double> coords;
};

struct ProjectedPoints {
  std::size_t dim = 0;
  std::vector<ProjectedRow> rows;
};

// Centered PCA onto the top `out_dim` (2 or 3) principal components. Each
// component's sign is fixed so its largest-magnitude loading is positive.
ProjectedPoints project(std::span<const LabeledPoint> points, std::size_t out_dim);

// CSV with header `token,label,x,y[,z]`.
void write_projection_csv(const ProjectedPoints& points, std::ostream& out);

}  // namespace nehs
