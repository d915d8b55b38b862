#pragma once

#include <functional>
#include <random>
#include <vector>

#include "homsum/coefficients.hpp"

namespace homsum::testing {

inline CoefficientFamily random_family(std::mt19937_64& gen, int degree, int support, double density,
                                       bool top_only = false) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<CoefficientEntry> entries;
  for (int m = top_only ? degree : 1; m <= degree; ++m) {
    std::vector<int> key(static_cast<std::size_t>(m));
    std::function<void(int, int)> rec = [&](int pos, int start) {
      if (pos == m) {
        if (coin(gen) < density) entries.push_back({key, normal(gen)});
        return;
      }
      for (int v = start; v <= support; ++v) {
        key[static_cast<std::size_t>(pos)] = v;
        rec(pos + 1, v + 1);
      }
    };
    rec(0, 1);
  }
  return CoefficientFamily(degree, support, std::move(entries));
}

/// Calls fn on every ordered tuple of length m over 1..support, repeats included.
inline void for_each_tuple(int m, int support, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> t(static_cast<std::size_t>(m), 1);
  if (m == 0) {
    fn(t);
    return;
  }
  for (;;) {
    fn(t);
    int p = m - 1;
    while (p >= 0 && t[static_cast<std::size_t>(p)] == support) t[static_cast<std::size_t>(p--)] = 1;
    if (p < 0) return;
    ++t[static_cast<std::size_t>(p)];
  }
}

inline std::vector<int> join(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace homsum::testing
