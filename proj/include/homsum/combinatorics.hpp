#pragma once

#include <array>
#include <cstdint>

#include "homsum/error.hpp"

namespace homsum {

inline constexpr int kMaxFactorial = 20;

namespace detail {
constexpr std::array<std::uint64_t, kMaxFactorial + 1> make_factorials() {
  std::array<std::uint64_t, kMaxFactorial + 1> table{};
  table[0] = 1;
  for (int i = 1; i <= kMaxFactorial; ++i) table[i] = table[i - 1] * static_cast<std::uint64_t>(i);
  return table;
}
inline constexpr auto kFactorials = make_factorials();
}  // namespace detail

/// n! computed exactly in 64-bit integers, then converted. Valid for n <= 20.
inline std::uint64_t factorial_exact(int n) {
  require(n >= 0 && n <= kMaxFactorial, "factorial argument out of range [0, 20]");
  return detail::kFactorials[static_cast<std::size_t>(n)];
}

inline double factorial(int n) { return static_cast<double>(factorial_exact(n)); }

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return static_cast<double>(factorial_exact(n) / (factorial_exact(k) * factorial_exact(n - k)));
}

}  // namespace homsum
