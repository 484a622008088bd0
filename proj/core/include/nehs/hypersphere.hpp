#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nehs/prf.hpp"
#include "nehs/types.hpp"

namespace nehs {

// Closed description of one entity type in an embedding space: a word W is
// predicted to be an entity iff ED(W, center) < radius.
struct Hypersphere {
  Vector center;
  double radius = 0.0;
  NeType type = NeType::All;
};

struct UniverseItem {
  std::string id;
  Vector vector;
  bool positive = false;
};

// Candidate pool for hypersphere evaluation. Positives form the reference
// set T; the predicted set P is every item inside the sphere.
class Universe {
 public:
  // Throws UsageError on a duplicate id or a dimension mismatch.
  void add(std::string id, VectorView vector, bool positive);

  // Marks an existing item as positive. Returns false if the id is unknown.
  bool mark_positive(std::string_view id);
  bool contains_id(std::string_view id) const;

  const std::vector<UniverseItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t positive_count() const { return positives_; }
  std::size_t dim() const { return dim_; }

 private:
  std::vector<UniverseItem> items_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t positives_ = 0;
  std::size_t dim_ = 0;
};

// sqrt(sum_k (w_k - c_k)^2). Throws UsageError on a dimension mismatch.
double euclidean_distance(VectorView w, VectorView c);

enum class CenterMethod { Mean, Median };

// Componentwise mean (or median) of the positive vectors.
Vector fit_center(std::span<const Vector> positives, CenterMethod method = CenterMethod::Mean);

struct RadiusFit {
  double radius = 0.0;
  PrfReport report;
};

// Exact F1-maximizing radius for a fixed center.
//
// Candidate radii are 0, the midpoint between each pair of consecutive
// distinct item distances, and a value just above the largest distance;
// together they realize every distinct predicted set. The smallest radius
// reaching the maximal F1 wins. Distances may be computed on `threads`
// workers; the result does not depend on the thread count.
RadiusFit fit_radius(VectorView center, const Universe& universe, std::size_t threads = 1);

bool contains(const Hypersphere& sphere, VectorView w);

// Distance to the center; smaller means more entity-like.
double ne_likelihood(const Hypersphere& sphere, VectorView w);

PrfReport evaluate(const Hypersphere& sphere, const Universe& universe, std::size_t threads = 1);

// {"ne_type": ..., "radius": ..., "center": [...]} with round-trip exact
// decimals. A sphere file holds one such object or an array of them.
std::string to_json(const Hypersphere& sphere);
std::string to_json(std::span<const Hypersphere> spheres);
std::vector<Hypersphere> spheres_from_json(std::string_view json);
void save_spheres(std::span<const Hypersphere> spheres, const std::filesystem::path& path);
std::vector<Hypersphere> load_spheres(const std::filesystem::path& path);

}  // namespace nehs
