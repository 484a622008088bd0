#include <cmath>

#include <json.hpp>

#include "nehs/alignment.hpp"
#include "nehs/error.hpp"
#include "nehs/hypersphere.hpp"
#include "nehs/tagger.hpp"
#include "nehs/text_io.hpp"

namespace nehs {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json& obj, const char* key, std::string_view what) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError(std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

std::vector<double> finite_values(const json& obj, const char* key, std::string_view what) {
  auto values = field<std::vector<double>>(obj, key, what);
  for (double v : values) {
    if (!std::isfinite(v)) throw FormatError(std::string(what) + ": non-finite value in '" + key + "'");
  }
  return values;
}

Matrix matrix_from(const json& obj, const char* key, Eigen::Index rows, Eigen::Index cols, std::string_view what) {
  const auto values = finite_values(obj, key, what);
  if (values.size() != static_cast<std::size_t>(rows * cols)) {
    throw FormatError(std::string(what) + ": '" + key + "' has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(rows * cols));
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

json row_major(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

json sphere_json(const Hypersphere& sphere) {
  json out;
  out["ne_type"] = std::string(to_string(sphere.type));
  out["radius"] = sphere.radius;
  out["center"] = std::vector<double>(sphere.center.data(), sphere.center.data() + sphere.center.size());
  return out;
}

Hypersphere sphere_from(const json& obj) {
  constexpr std::string_view what = "hypersphere";
  Hypersphere sphere;
  const auto type = parse_ne_type(field<std::string>(obj, "ne_type", what));
  if (!type) throw FormatError("hypersphere: unknown ne_type");
  sphere.type = *type;
  sphere.radius = field<double>(obj, "radius", what);
  if (!std::isfinite(sphere.radius) || sphere.radius < 0.0) throw FormatError("hypersphere: invalid radius");
  const auto center = finite_values(obj, "center", what);
  if (center.empty()) throw FormatError("hypersphere: empty center");
  sphere.center = Eigen::Map<const Vector>(center.data(), static_cast<Eigen::Index>(center.size()));
  return sphere;
}

}  // namespace

std::string to_json(const Hypersphere& sphere) { return sphere_json(sphere).dump(2) + "\n"; }

std::string to_json(std::span<const Hypersphere> spheres) {
  json out = json::array();
  for (const auto& s : spheres) out.push_back(sphere_json(s));
  return out.dump(2) + "\n";
}

std::vector<Hypersphere> spheres_from_json(std::string_view text) {
  const json doc = parse_json(text, "hypersphere");
  std::vector<Hypersphere> out;
  if (doc.is_array()) {
    for (const auto& item : doc) out.push_back(sphere_from(item));
  } else {
    out.push_back(sphere_from(doc));
  }
  if (out.empty()) throw FormatError("hypersphere: file holds no spheres");
  return out;
}

void save_spheres(std::span<const Hypersphere> spheres, const std::filesystem::path& path) {
  io::write_file(path, spheres.size() == 1 ? to_json(spheres.front()) : to_json(spheres));
}

std::vector<Hypersphere> load_spheres(const std::filesystem::path& path) {
  return spheres_from_json(io::read_file(path));
}

std::string to_json(const AlignmentMap& map) {
  json out;
  out["source_tag"] = map.source_tag;
  out["target_tag"] = map.target_tag;
  out["rows"] = map.matrix.rows();
  out["cols"] = map.matrix.cols();
  out["matrix"] = row_major(map.matrix);
  out["method"] = map.method;
  out["iterations"] = map.iterations;
  out["final_critic_loss"] = map.final_critic_loss;
  return out.dump(2) + "\n";
}

AlignmentMap alignment_from_json(std::string_view text) {
  constexpr std::string_view what = "alignment map";
  const json doc = parse_json(text, what);
  AlignmentMap map;
  map.source_tag = field<std::string>(doc, "source_tag", what);
  map.target_tag = field<std::string>(doc, "target_tag", what);
  const auto rows = field<std::size_t>(doc, "rows", what);
  const auto cols = field<std::size_t>(doc, "cols", what);
  if (rows == 0 || cols == 0) throw FormatError("alignment map: empty matrix");
  map.matrix = matrix_from(doc, "matrix", static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols), what);
  if (doc.contains("method")) map.method = field<std::string>(doc, "method", what);
  if (doc.contains("iterations")) map.iterations = field<std::size_t>(doc, "iterations", what);
  if (doc.contains("final_critic_loss")) map.final_critic_loss = field<double>(doc, "final_critic_loss", what);
  return map;
}

void save_alignment(const AlignmentMap& map, const std::filesystem::path& path) {
  io::write_file(path, to_json(map));
}

AlignmentMap load_alignment(const std::filesystem::path& path) {
  return alignment_from_json(io::read_file(path));
}

std::string to_json(const CrfModel& model) {
  const auto& spec = model.feature_spec();
  json out;
  out["tags"] = model.tags();
  out["feature_spec"] = {{"embedding", spec.embedding},
                         {"embedding_dim", spec.embedding_dim},
                         {"hypersphere", spec.hypersphere},
                         {"lexical", spec.lexical}};
  out["transitions"] = row_major(model.transitions());
  out["emissions"] = row_major(model.emissions());
  return out.dump(2) + "\n";
}

CrfModel crf_from_json(std::string_view text) {
  constexpr std::string_view what = "CRF model";
  const json doc = parse_json(text, what);
  const auto tags = field<std::vector<std::string>>(doc, "tags", what);
  const json spec_obj = field<json>(doc, "feature_spec", what);
  FeatureSpec spec;
  spec.embedding = field<bool>(spec_obj, "embedding", what);
  spec.embedding_dim = field<std::size_t>(spec_obj, "embedding_dim", what);
  spec.hypersphere = field<bool>(spec_obj, "hypersphere", what);
  spec.lexical = field<bool>(spec_obj, "lexical", what);
  CrfModel model = [&] {
    try {
      return CrfModel(tags, spec);
    } catch (const UsageError& e) {
      throw FormatError(std::string(what) + ": " + e.what());
    }
  }();
  model.transitions() = matrix_from(doc, "transitions", model.transitions().rows(), model.transitions().cols(), what);
  model.emissions() = matrix_from(doc, "emissions", model.emissions().rows(), model.emissions().cols(), what);
  return model;
}

void save_crf(const CrfModel& model, const std::filesystem::path& path) { io::write_file(path, to_json(model)); }

CrfModel load_crf(const std::filesystem::path& path) { return crf_from_json(io::read_file(path)); }

}  // namespace nehs
