#include "homsum/multi_index.hpp"

#include <algorithm>

#include "homsum/combinatorics.hpp"
#include "homsum/error.hpp"

namespace homsum {

std::optional<MultiIndex> canonicalize(std::span<const int> raw) {
  require(!raw.empty(), "canonicalize: empty index list");
  MultiIndex out(raw.begin(), raw.end());
  std::sort(out.begin(), out.end());
  require(out.front() >= 1, "canonicalize: indices must be positive");
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) return std::nullopt;
  return out;
}

bool is_canonical(std::span<const int> indices) {
  if (indices.empty() || indices.front() < 1) return false;
  for (std::size_t i = 1; i < indices.size(); ++i)
    if (indices[i] <= indices[i - 1]) return false;
  return true;
}

double permutation_count(std::span<const int> sorted) {
  double count = factorial(static_cast<int>(sorted.size()));
  std::size_t run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      count /= factorial(static_cast<int>(run));
      run = 1;
    }
  }
  return count;
}

}  // namespace homsum
