#include "nehs/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "nehs/error.hpp"
#include "nehs/numeric.hpp"
#include "nehs/text_io.hpp"

namespace nehs {

EmbeddingSpace::EmbeddingSpace(std::size_t dim, std::string language_tag)
    : dim_(dim), language_tag_(std::move(language_tag)) {
  if (dim == 0) throw UsageError("embedding dimension must be positive");
}

bool EmbeddingSpace::add(std::string token, VectorView vector) {
  if (static_cast<std::size_t>(vector.size()) != dim_) {
    throw FormatError("vector for '" + token + "' has " + std::to_string(vector.size()) +
                      " components, expected " + std::to_string(dim_));
  }
  if (!vector.allFinite()) throw FormatError("vector for '" + token + "' has a non-finite component");
  if (index_.contains(token)) {
    ++duplicates_;
    return false;
  }
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  values_.insert(values_.end(), vector.data(), vector.data() + vector.size());
  return true;
}

std::optional<std::size_t> EmbeddingSpace::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingSpace::reserve(std::size_t count) {
  tokens_.reserve(count);
  values_.reserve(count * dim_);
  index_.reserve(count);
}

EmbeddingSpace parse_embeddings(std::istream& in, std::string_view source_name,
                                std::optional<std::size_t> limit) {
  const std::string where(source_name);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(where + ": missing header line");
  const auto header = io::split(io::chomp(line), ' ');
  std::size_t count = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !io::parse_size(header[0], count) || !io::parse_size(header[1], dim) ||
      dim == 0) {
    throw FormatError(where + ":1: malformed header, expected '<count> <dim>'");
  }

  EmbeddingSpace space(dim);
  const std::size_t cap = limit ? *limit : count;
  space.reserve(std::min(cap, count));
  Vector values(static_cast<Eigen::Index>(dim));
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (rows < count && space.size() < cap && std::getline(in, line)) {
    ++line_no;
    const auto fields = io::split_whitespace(io::chomp(line));
    if (fields.empty()) continue;
    const std::string at = where + ":" + std::to_string(line_no);
    if (fields.size() != dim + 1) {
      throw FormatError(at + ": expected token plus " + std::to_string(dim) + " values, got " +
                        std::to_string(fields.size() - 1));
    }
    for (std::size_t k = 0; k < dim; ++k) {
      double v = 0.0;
      if (!io::parse_double(fields[k + 1], v)) {
        throw FormatError(at + ": cannot parse value '" + std::string(fields[k + 1]) + "'");
      }
      if (!std::isfinite(v)) throw FormatError(at + ": non-finite value");
      values[static_cast<Eigen::Index>(k)] = v;
    }
    space.add(std::string(fields[0]), values);
    ++rows;
  }
  if (space.size() >= cap) return space;
  if (rows < count) {
    throw FormatError(where + ": header declares " + std::to_string(count) + " rows but only " +
                      std::to_string(rows) + " were found");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!io::split_whitespace(line).empty()) {
      throw FormatError(where + ":" + std::to_string(line_no) + ": more rows than the header's count " +
                        std::to_string(count));
    }
  }
  return space;
}

EmbeddingSpace load_embeddings(const std::filesystem::path& path, std::optional<std::size_t> limit) {
  auto in = io::open_input(path);
  auto space = parse_embeddings(in, path.string(), limit);
  space.set_language_tag(path.stem().string());
  return space;
}

void write_embeddings(const EmbeddingSpace& space, std::ostream& out) {
  out << space.size() << ' ' << space.dim() << '\n';
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << space.token(i);
    const auto v = space.vector(i);
    for (Eigen::Index k = 0; k < v.size(); ++k) out << ' ' << format_double(v[k]);
    out << '\n';
  }
}

void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path) {
  auto out = io::open_output(path);
  write_embeddings(space, out);
  if (!out) throw IoError("failed writing " + path.string());
}

std::optional<std::size_t> find_token(const EmbeddingSpace& space, std::string_view token,
                                      LookupPolicy policy) {
  if (auto idx = space.index_of(token)) return idx;
  if (!policy.lowercase_fallback) return std::nullopt;
  std::string lowered(token);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == token) return std::nullopt;
  return space.index_of(lowered);
}

std::optional<Vector> lookup(const EmbeddingSpace& space, std::string_view token, LookupPolicy policy) {
  if (auto idx = find_token(space, token, policy)) return Vector(space.vector(*idx));
  return std::nullopt;
}

PhraseVector phrase_vector(const EmbeddingSpace& space, std::span<const std::string> tokens,
                           LookupPolicy policy) {
  if (tokens.empty()) throw UsageError("phrase_vector: empty token sequence");
  PhraseVector result;
  // Incremental mean: repeated copies of one vector average to it exactly.
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
  std::size_t found = 0;
  for (const auto& token : tokens) {
    if (auto idx = find_token(space, token, policy)) {
      ++found;
      mean += (space.vector(*idx) - mean) / static_cast<double>(found);
    } else {
      ++result.skipped;
    }
  }
  if (found > 0) result.value = std::move(mean);
  return result;
}

ProjectedPoints project(std::span<const LabeledPoint> points, std::size_t out_dim) {
  if (out_dim != 2 && out_dim != 3) throw UsageError("projection dimension must be 2 or 3");
  if (points.size() < out_dim + 1) {
    throw UsageError("projection to " + std::to_string(out_dim) + "-D needs at least " +
                     std::to_string(out_dim + 1) + " points, got " + std::to_string(points.size()));
  }
  const Eigen::Index dim = points.front().vector.size();
  if (dim < static_cast<Eigen::Index>(out_dim)) {
    throw UsageError("input dimension " + std::to_string(dim) + " is below the projection dimension");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Matrix data(dim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& v = points[static_cast<std::size_t>(i)].vector;
    if (v.size() != dim) throw UsageError("projection inputs have mixed dimensions");
    data.col(i) = v;
  }
  const Vector mean = data.rowwise().mean();
  data.colwise() -= mean;
  const Matrix cov = (data * data.transpose()) / static_cast<double>(n);
  if (cov.trace() <= 0.0) throw DegenerateDataError("projection inputs are all identical");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw DegenerateDataError("covariance eigendecomposition failed");
  // Eigenvalues come back ascending.
  Matrix basis(dim, static_cast<Eigen::Index>(out_dim));
  for (std::size_t c = 0; c < out_dim; ++c) {
    Vector axis = solver.eigenvectors().col(dim - 1 - static_cast<Eigen::Index>(c));
    Eigen::Index largest = 0;
    axis.cwiseAbs().maxCoeff(&largest);
    if (axis[largest] < 0.0) axis = -axis;
    basis.col(static_cast<Eigen::Index>(c)) = axis;
  }
  const Matrix coords = basis.transpose() * data;

  ProjectedPoints out;
  out.dim = out_dim;
  out.rows.reserve(points.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    ProjectedRow row{p.token, p.label, {}};
    for (std::size_t c = 0; c < out_dim; ++c) row.coords.push_back(coords(static_cast<Eigen::Index>(c), i));
    out.rows.push_back(std::move(row));
  }
  return out;
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void write_projection_csv(const ProjectedPoints& points, std::ostream& out) {
  static constexpr const char* kAxes[] = {"x", "y", "z"};
  out << "token,label";
  for (std::size_t c = 0; c < points.dim; ++c) out << ',' << kAxes[c];
  out << '\n';
  for (const auto& row : points.rows) {
    out << csv_field(row.token) << ',' << csv_field(row.label);
    for (double v : row.coords) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace nehs
