#pragma once

#include <cstddef>
#include <vector>

#include "nehs/dictionary.hpp"
#include "nehs/embeddings.hpp"
#include "nehs/hypersphere.hpp"

namespace nehs {

// Candidate pool for one entity type: every vocabulary token, plus each
// multi-word dictionary entry as an extra item. Resolved entries of `type`
// (every type for NeType::All) are the positives.
Universe build_universe(const EmbeddingSpace& space, const ResolvedEntities& resolved, NeType type,
                        LookupPolicy policy = {});

struct FittedSphere {
  Hypersphere sphere;
  PrfReport report;        // evaluate() of the fitted sphere on its universe
  std::size_t resolved = 0;
  std::size_t oov = 0;
};

// resolve -> fit_center -> fit_radius -> evaluate for one type. Throws
// UsageError when no entry of the type resolves.
FittedSphere fit_hypersphere(const EmbeddingSpace& space, const ResolvedEntities& resolved, NeType type,
                             CenterMethod method = CenterMethod::Mean, LookupPolicy policy = {},
                             std::size_t threads = 1);

// Vocabulary vectors closer than 2 * radius to the sphere's center, or the
// whole vocabulary if none is. Used to estimate radius scaling under a map.
std::vector<Vector> sphere_sample(const EmbeddingSpace& space, const Hypersphere& sphere);

}  // namespace nehs
