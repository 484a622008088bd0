#include "nehs/hypersphere.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nehs/error.hpp"
#include "nehs/parallel.hpp"

namespace nehs {

void Universe::add(std::string id, VectorView vector, bool positive) {
  if (items_.empty()) {
    dim_ = static_cast<std::size_t>(vector.size());
  } else if (static_cast<std::size_t>(vector.size()) != dim_) {
    throw UsageError("universe item '" + id + "' has dimension " + std::to_string(vector.size()) +
                     ", expected " + std::to_string(dim_));
  }
  if (index_.contains(id)) throw UsageError("duplicate universe id '" + id + "'");
  index_.emplace(id, items_.size());
  items_.push_back({std::move(id), Vector(vector), positive});
  if (positive) ++positives_;
}

bool Universe::mark_positive(std::string_view id) {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return false;
  auto& item = items_[it->second];
  if (!item.positive) {
    item.positive = true;
    ++positives_;
  }
  return true;
}

bool Universe::contains_id(std::string_view id) const { return index_.contains(std::string(id)); }

double euclidean_distance(VectorView w, VectorView c) {
  if (w.size() != c.size()) {
    throw UsageError("distance between vectors of dimension " + std::to_string(w.size()) + " and " +
                     std::to_string(c.size()));
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double d = w[k] - c[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

Vector fit_center(std::span<const Vector> positives, CenterMethod method) {
  if (positives.empty()) throw UsageError("fit_center needs at least one positive vector");
  const Eigen::Index dim = positives.front().size();
  for (const auto& v : positives) {
    if (v.size() != dim) throw UsageError("fit_center inputs have mixed dimensions");
  }
  if (method == CenterMethod::Mean) {
    Vector mean = Vector::Zero(dim);
    double n = 0.0;
    for (const auto& v : positives) {
      n += 1.0;
      mean += (v - mean) / n;
    }
    return mean;
  }
  Vector median(dim);
  std::vector<double> column(positives.size());
  for (Eigen::Index k = 0; k < dim; ++k) {
    for (std::size_t i = 0; i < positives.size(); ++i) column[i] = positives[i][k];
    std::sort(column.begin(), column.end());
    const std::size_t mid = column.size() / 2;
    median[k] = column.size() % 2 == 1 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
  }
  return median;
}

namespace {

std::vector<double> distances_to(VectorView center, const Universe& universe, std::size_t threads) {
  if (universe.size() > 0 && static_cast<std::size_t>(center.size()) != universe.dim()) {
    throw UsageError("center dimension " + std::to_string(center.size()) +
                     " does not match universe dimension " + std::to_string(universe.dim()));
  }
  const auto& items = universe.items();
  std::vector<double> dist(items.size());
  parallel_for(items.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) dist[i] = euclidean_distance(items[i].vector, center);
  });
  return dist;
}

// Radius strictly between `below` and `above` (so that `below` is inside and
// `above` is not), or `above` itself when the two are adjacent doubles.
double radius_between(double below, double above) {
  const double mid = below + (above - below) / 2.0;
  return mid > below ? mid : above;
}

}  // namespace

RadiusFit fit_radius(VectorView center, const Universe& universe, std::size_t threads) {
  if (universe.size() == 0) throw UsageError("fit_radius needs a non-empty universe");
  if (universe.positive_count() == 0) throw UsageError("fit_radius needs at least one positive");

  const auto dist = distances_to(center, universe, threads);
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

  const std::size_t true_count = universe.positive_count();
  RadiusFit best{0.0, make_prf(true_count, 0, 0)};
  std::size_t predicted = 0;
  std::size_t hits = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double d = dist[order[i]];
    // Admit the whole group of items at this distance.
    while (i < order.size() && dist[order[i]] == d) {
      ++predicted;
      if (universe.items()[order[i]].positive) ++hits;
      ++i;
    }
    const double radius = i < order.size() ? radius_between(d, dist[order[i]])
                                            : d + std::max(1e-9, d * 1e-9);
    const PrfReport report = make_prf(true_count, predicted, hits);
    if (report.f1 > best.report.f1) best = {radius, report};
  }
  return best;
}

bool contains(const Hypersphere& sphere, VectorView w) {
  return euclidean_distance(w, sphere.center) < sphere.radius;
}

double ne_likelihood(const Hypersphere& sphere, VectorView w) { return euclidean_distance(w, sphere.center); }

PrfReport evaluate(const Hypersphere& sphere, const Universe& universe, std::size_t threads) {
  const auto dist = distances_to(sphere.center, universe, threads);
  std::size_t predicted = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] < sphere.radius) {
      ++predicted;
      if (universe.items()[i].positive) ++hits;
    }
  }
  return make_prf(universe.positive_count(), predicted, hits);
}

}  // namespace nehs
