#ifndef SDC_CONF_MODELS_H_
#define SDC_CONF_MODELS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sdc/release.h"
#include "sdc/table.h"

namespace sdc {

enum class GroundDistance {
  kOrderedNumeric,       // |i - j| / (m - 1) over ranks of the sorted support
  kCategoricalUniform,   // 1 for distinct values
};

// A distribution over an ordered support of cell texts.
struct Distribution {
  std::vector<std::string> support;
  Eigen::VectorXd mass;
};

// Sorted support of a column: numerically for numeric attributes,
// lexicographically otherwise.
std::vector<std::string> SupportOf(const MicrodataTable& table, std::size_t column);

// Empirical distribution of `values` over `support`. Values outside the
// support throw kSupportMismatch.
Distribution EmpiricalDistribution(std::span<const Cell> values,
                                   const std::vector<std::string>& support);

Eigen::MatrixXd GroundDistanceMatrix(GroundDistance d, std::size_t m);

// Earth mover's distance between two distributions on the same support.
// Closed forms: cumulative-difference sum for the ordered ground distance,
// total variation for the uniform one.
double Emd(const Distribution& p, const Distribution& q, GroundDistance d);

enum class LDiversityVariant { kDistinct, kEntropy };

// Number of distinct values, or exp(Shannon entropy) with natural logs.
double LDiversity(std::span<const Cell> values, LDiversityVariant variant);

struct ClassMeasure {
  std::vector<double> values;  // one per class
  double worst = 0.0;          // min for l-diversity, max for t-closeness
  bool satisfied = false;
};

ClassMeasure VerifyLDiversity(const MicrodataTable& table, const Partition& partition,
                              const std::string& conf_attribute, double l,
                              LDiversityVariant variant);

// EMD of every class distribution to the whole-table distribution.
ClassMeasure VerifyTCloseness(const MicrodataTable& table, const Partition& partition,
                              const std::string& conf_attribute, double t, GroundDistance d);

// Multiplicative closeness bound t (class/global probability ratios within
// [1/t, t]) read as the epsilon of the equivalent DP guarantee: ln t.
double ClosenessToDpEpsilon(double multiplicative_t);

struct ModelTargets {
  int k = 2;
  std::optional<double> l;
  LDiversityVariant l_variant = LDiversityVariant::kDistinct;
  std::optional<double> t;
  GroundDistance ground = GroundDistance::kOrderedNumeric;
};

// Starts from the MDAV partition at k and merges the first violating class
// into the class with the nearest centroid (standardized QIs) until every
// class meets k, l and t. Throws kInfeasible when one class is left and it
// still violates a target.
Partition EnforceModels(const MicrodataTable& table, std::span<const std::string> qi_attributes,
                        const std::string& conf_attribute, const ModelTargets& targets);

// True when the class range of a numeric confidential attribute is below
// `threshold` times the global range, i.e. values are too similar even if
// distinct. A constant class always alerts.
bool SimilarityAlert(std::span<const double> class_values, std::span<const double> global_values,
                     double threshold = 0.1);

}  // namespace sdc

#endif  // SDC_CONF_MODELS_H_
