#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace nehs {

// log(exp(a) + exp(b)) without overflow; -inf inputs are handled.
double log_add(double a, double b);

// log(sum_i exp(values[i])). Returns -inf for an empty span.
double log_sum_exp(std::span<const double> values);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace nehs
