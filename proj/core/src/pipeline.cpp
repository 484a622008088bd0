#include "nehs/pipeline.hpp"

#include "nehs/error.hpp"

namespace nehs {

Universe build_universe(const EmbeddingSpace& space, const ResolvedEntities& resolved, NeType type,
                        LookupPolicy policy) {
  Universe universe;
  for (std::size_t i = 0; i < space.size(); ++i) universe.add(space.token(i), space.vector(i), false);
  for (const ResolvedEntity* entity : resolved.select(type)) {
    if (universe.mark_positive(entity->surface)) continue;
    if (entity->surface.find(' ') == std::string::npos) {
      if (auto idx = find_token(space, entity->surface, policy)) {
        universe.mark_positive(space.token(*idx));
        continue;
      }
    }
    universe.add(entity->surface, entity->vector, true);
  }
  return universe;
}

FittedSphere fit_hypersphere(const EmbeddingSpace& space, const ResolvedEntities& resolved, NeType type,
                             CenterMethod method, LookupPolicy policy, std::size_t threads) {
  const auto entities = resolved.select(type);
  FittedSphere out;
  out.resolved = entities.size();
  if (type == NeType::All) {
    for (NeType t : kEntityTypes) out.oov += resolved.oov_count(t);
  } else {
    out.oov = resolved.oov_count(type);
  }
  if (entities.empty()) {
    throw UsageError("no " + std::string(to_string(type)) + " dictionary entry resolves in the embedding space");
  }
  std::vector<Vector> positives;
  positives.reserve(entities.size());
  for (const auto* e : entities) positives.push_back(e->vector);

  const Universe universe = build_universe(space, resolved, type, policy);
  out.sphere.type = type;
  out.sphere.center = fit_center(positives, method);
  out.sphere.radius = fit_radius(out.sphere.center, universe, threads).radius;
  out.report = evaluate(out.sphere, universe, threads);
  return out;
}

std::vector<Vector> sphere_sample(const EmbeddingSpace& space, const Hypersphere& sphere) {
  std::vector<Vector> sample;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (euclidean_distance(space.vector(i), sphere.center) < 2.0 * sphere.radius) sample.emplace_back(space.vector(i));
  }
  if (sample.empty()) {
    for (std::size_t i = 0; i < space.size(); ++i) sample.emplace_back(space.vector(i));
  }
  return sample;
}

}  // namespace nehs
