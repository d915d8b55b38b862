#include "homsum/coeff_io.hpp"

#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "homsum/error.hpp"

namespace homsum {

using nlohmann::json;

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t state) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state ^= bytes[i];
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CoefficientFamily parse_coefficients_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("coefficient file: ") + e.what());
  }
  try {
    const int degree = doc.at("degree").get<int>();
    const int support = doc.at("support").get<int>();
    std::vector<CoefficientEntry> entries;
    for (const auto& item : doc.at("entries")) {
      CoefficientEntry e;
      e.indices = item.at("indices").get<std::vector<int>>();
      e.value = item.at("value").get<double>();
      if (!is_canonical(e.indices))
        throw ConfigError("coefficient file: key is not strictly increasing (diagonal or unsorted)");
      entries.push_back(std::move(e));
    }
    return CoefficientFamily(degree, support, std::move(entries));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("coefficient file: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("coefficient file: ") + e.what());
  }
}

std::string coefficients_to_json(const CoefficientFamily& c) {
  json doc;
  doc["degree"] = c.degree();
  doc["support"] = c.support();
  doc["entries"] = json::array();
  for (const auto& e : c.entries()) doc["entries"].push_back({{"indices", e.indices}, {"value", e.value}});
  return doc.dump(2);
}

CoefficientFamily parse_dense_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("dense coefficient csv: bad number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw ConfigError("dense coefficient csv: empty matrix");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw ConfigError("dense coefficient csv: matrix is not square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  try {
    return CoefficientFamily::from_dense(m);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

CoefficientFamily load_coefficients(const std::string& path) {
  const std::string text = read_text_file(path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return parse_dense_csv(text);
  return parse_coefficients_json(text);
}

std::uint64_t coefficients_hash(const CoefficientFamily& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int32_t header[2] = {c.degree(), c.support()};
  h = fnv1a(header, sizeof header, h);
  for (int m = 1; m <= c.degree(); ++m) {
    for (std::size_t e = 0; e < c.level_size(m); ++e) {
      const auto k = c.key(m, e);
      h = fnv1a(k.data(), k.size_bytes(), h);
      const double v = c.value(m, e);
      h = fnv1a(&v, sizeof v, h);
    }
  }
  return h;
}

}  // namespace homsum
