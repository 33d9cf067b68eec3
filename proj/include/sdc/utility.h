#ifndef SDC_UTILITY_H_
#define SDC_UTILITY_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "sdc/dp.h"
#include "sdc/kanon.h"
#include "sdc/table.h"

namespace sdc {

struct WorkloadError {
  Query query;
  double original = 0.0;
  std::optional<double> released;  // none when the release cannot answer
  std::optional<double> abs_error;
};

struct UtilityReport {
  SseResult sse;
  // Per attribute: total variation for categorical attributes, 1-D EMD
  // divided by the domain width (or observed range) for numeric ones.
  std::map<std::string, double> marginal_distance;
  std::vector<WorkloadError> workload;

  nlohmann::json ToJson() const;
};

// 1-D earth mover's distance between two empirical samples.
double EmpiricalEmd1d(std::span<const double> a, std::span<const double> b);

// Compares the attributes the release shares with the original. Rows are
// matched by row id (kMisaligned when a released row has no original).
// Generalized numeric cells are read at their interval midpoints.
UtilityReport ComputeUtility(const MicrodataTable& original, const MicrodataTable& release,
                             std::span<const Query> workload = {});

// The release with every attribute that is numeric in the original turned
// back into numbers (midpoints for interval labels), so numeric queries can
// be evaluated on it.
MicrodataTable NumericView(const MicrodataTable& original, const MicrodataTable& release);

}  // namespace sdc

#endif  // SDC_UTILITY_H_
