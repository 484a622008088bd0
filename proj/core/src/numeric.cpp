#include "nehs/numeric.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "nehs/types.hpp"

namespace nehs {

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double max = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string_view to_string(NeType type) {
  switch (type) {
    case NeType::Per: return "Per";
    case NeType::Loc: return "Loc";
    case NeType::Org: return "Org";
    case NeType::All: return "All";
  }
  return "All";
}

std::optional<NeType> parse_ne_type(std::string_view text) {
  if (text == "Per") return NeType::Per;
  if (text == "Loc") return NeType::Loc;
  if (text == "Org") return NeType::Org;
  if (text == "All") return NeType::All;
  return std::nullopt;
}

std::size_t type_slot(NeType type) {
  switch (type) {
    case NeType::Per: return 0;
    case NeType::Loc: return 1;
    case NeType::Org: return 2;
    case NeType::All: break;
  }
  return 3;
}

}  // namespace nehs
