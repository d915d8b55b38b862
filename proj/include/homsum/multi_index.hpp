#pragma once

#include <optional>
#include <span>
#include <vector>

namespace homsum {

/// Strictly increasing list of positive variable indices. An ordered tuple
/// with a repeated entry has no canonical form (the family vanishes there).
using MultiIndex = std::vector<int>;

/// Sorts `raw`; returns nullopt when an index repeats. Throws ArgumentError
/// on an empty list or a non-positive index.
std::optional<MultiIndex> canonicalize(std::span<const int> raw);

inline std::optional<MultiIndex> canonicalize(std::initializer_list<int> raw) {
  return canonicalize(std::span<const int>(raw.begin(), raw.size()));
}

bool is_canonical(std::span<const int> indices);

/// Number of distinct orderings of a sorted tuple (multinomial count).
double permutation_count(std::span<const int> sorted);

}  // namespace homsum
