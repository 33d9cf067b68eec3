#ifndef SDC_TESTS_SUPPORT_H_
#define SDC_TESTS_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sdc/rng.h"
#include "sdc/table.h"

namespace sdc::testing {

// n rows of `qis` continuous QIs q0.. on [0, 100] plus a numeric
// confidential attribute c on [0, 1000].
inline MicrodataTable RandomNumericTable(Rng& rng, std::size_t n, std::size_t qis) {
  Schema schema;
  for (std::size_t a = 0; a < qis; ++a) {
    schema.push_back(AttributeSchema::Numeric("q" + std::to_string(a), Role::kQuasiIdentifier,
                                              0.0, 100.0));
  }
  schema.push_back(AttributeSchema::Numeric("c", Role::kConfidential, 0.0, 1000.0));
  std::vector<std::vector<Cell>> rows(n);
  for (auto& row : rows) {
    for (std::size_t a = 0; a < qis; ++a) row.push_back(rng.Uniform(0.0, 100.0));
    row.push_back(std::floor(rng.Uniform(0.0, 1000.0)));
  }
  return MicrodataTable(std::move(schema), std::move(rows));
}

inline std::vector<std::string> QiNames(std::size_t qis) {
  std::vector<std::string> out;
  for (std::size_t a = 0; a < qis; ++a) out.push_back("q" + std::to_string(a));
  return out;
}

// One numeric QI x on [lo, hi] holding `values`.
inline MicrodataTable Column(const std::vector<double>& values, double lo = 0.0,
                             double hi = 100.0, Role role = Role::kQuasiIdentifier) {
  std::vector<std::vector<Cell>> rows;
  for (double v : values) rows.push_back({v});
  return MicrodataTable({AttributeSchema::Numeric("x", role, lo, hi)}, std::move(rows));
}

// One categorical attribute `name` holding `values`.
inline MicrodataTable Labels(const std::string& name, const std::vector<std::string>& values,
                             Role role = Role::kConfidential) {
  std::vector<std::string> domain;
  for (const std::string& v : values) {
    if (std::find(domain.begin(), domain.end(), v) == domain.end()) domain.push_back(v);
  }
  std::vector<std::vector<Cell>> rows;
  for (const std::string& v : values) rows.push_back({v});
  return MicrodataTable({AttributeSchema::Categorical(name, role, domain)}, std::move(rows));
}

}  // namespace sdc::testing

#endif  // SDC_TESTS_SUPPORT_H_
