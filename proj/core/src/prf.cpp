#include "nehs/prf.hpp"

#include "nehs/error.hpp"

namespace nehs {

PrfReport make_prf(std::size_t true_count, std::size_t predicted_count, std::size_t hit_count) {
  if (hit_count > true_count || hit_count > predicted_count) {
    throw UsageError("hit count exceeds the true or predicted count");
  }
  PrfReport r;
  r.true_count = true_count;
  r.predicted_count = predicted_count;
  r.hit_count = hit_count;
  const double g = static_cast<double>(hit_count);
  r.precision = predicted_count > 0 ? g / static_cast<double>(predicted_count) : 0.0;
  r.recall = true_count > 0 ? g / static_cast<double>(true_count) : 0.0;
  const double sum = r.precision + r.recall;
  r.f1 = sum > 0.0 ? 2.0 * r.precision * r.recall / sum : 0.0;
  return r;
}

double relative_error_reduction(double f_old_pct, double f_new_pct) {
  if (f_old_pct >= 100.0) return 0.0;
  return (f_new_pct - f_old_pct) / (100.0 - f_old_pct) * 100.0;
}

}  // namespace nehs
