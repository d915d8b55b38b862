#pragma once

#include <cstdint>
#include <string>

#include "homsum/coefficients.hpp"

namespace homsum {

/// JSON layout: {"degree": N, "support": J, "entries": [{"indices": [...], "value": v}]}.
/// Keys must already be strictly increasing; anything else is a ConfigError.
CoefficientFamily parse_coefficients_json(const std::string& text);
std::string coefficients_to_json(const CoefficientFamily& coeffs);

/// Dense CSV of a level-2 family: J rows of J comma-separated values, zero
/// diagonal, symmetric within 1e-12. An optional header row is not allowed.
CoefficientFamily parse_dense_csv(const std::string& text);

/// Dispatches on the extension (.csv for dense matrices, JSON otherwise).
CoefficientFamily load_coefficients(const std::string& path);

/// FNV-1a over degree, support and every (key, value bit pattern) in storage order.
std::uint64_t coefficients_hash(const CoefficientFamily& coeffs);

std::string read_text_file(const std::string& path);
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t state = 0xcbf29ce484222325ULL);

}  // namespace homsum
