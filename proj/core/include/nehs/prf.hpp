#pragma once

#include <cstddef>

namespace nehs {

// Set-overlap precision / recall / F1 with the empty-set conventions
// precision = 0 when nothing is predicted and F1 = 0 when p + r = 0.
struct PrfReport {
  std::size_t true_count = 0;       // |T|
  std::size_t predicted_count = 0;  // |P|
  std::size_t hit_count = 0;        // |G| = |T ∩ P|
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PrfReport make_prf(std::size_t true_count, std::size_t predicted_count, std::size_t hit_count);

// Relative error-rate reduction on the percentage scale:
// (f_new - f_old) / (100 - f_old) * 100. Both scores are percentages.
double relative_error_reduction(double f_old_pct, double f_new_pct);

}  // namespace nehs
