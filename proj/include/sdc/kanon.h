#ifndef SDC_KANON_H_
#define SDC_KANON_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nlohmann/json.hpp"
#include "sdc/hierarchy.h"
#include "sdc/release.h"
#include "sdc/table.h"

namespace sdc {

struct KAnonymityCheck {
  bool satisfied = false;
  // Multiplicity of every distinct QI combination (cell texts).
  std::map<std::vector<std::string>, std::size_t> multiplicity;
  std::size_t violating_rows = 0;
};

// True iff every distinct QI combination occurs at least k times.
KAnonymityCheck VerifyKAnonymity(const MicrodataTable& release,
                                 std::span<const std::string> qi_attributes, int k);

// Groups rows by identical QI combination, in order of first appearance.
Partition EquivalenceClasses(const MicrodataTable& table,
                             std::span<const std::string> qi_attributes);

enum class Recoding { kGlobal, kLocal };

struct GeneralizationScheme {
  Recoding recoding = Recoding::kGlobal;
  std::vector<std::string> attributes;
  // Global recoding: one level per attribute.
  std::vector<int> levels;
  // Local recoding: levels[row][attribute] for every row of the input.
  std::vector<std::vector<int>> cell_levels;
  std::vector<RowId> suppressed_rows;

  int LevelFor(std::size_t row, std::size_t attribute) const {
    return recoding == Recoding::kGlobal ? levels[attribute] : cell_levels[row][attribute];
  }

  nlohmann::json ToJson() const;
  static GeneralizationScheme FromJson(const nlohmann::json& doc);
};

struct GeneralizationResult {
  AnonymizedRelease release;
  GeneralizationScheme scheme;
};

// Applies a scheme to every QI cell; generalized columns become categorical
// over the labels they use. Identifier columns are dropped and suppressed
// rows removed; the partition is the resulting set of QI classes.
AnonymizedRelease ApplyScheme(const MicrodataTable& table, const HierarchyMap& hierarchies,
                              const GeneralizationScheme& scheme);

// Greedy global recoding followed by suppression of residual violators.
// At each step the QI attribute whose one-level raise leaves the fewest
// rows in classes smaller than k is raised (ties: fewest distinct values at
// the current level, then schema order). Stops as soon as the violators fit
// within floor(max_suppression_fraction * n) and suppresses them.
GeneralizationResult AnonymizeGeneralization(const MicrodataTable& table,
                                             const HierarchyMap& hierarchies, int k,
                                             double max_suppression_fraction);

// Exhaustive search for the lexicographically first k-anonymous level
// assignment (cells in row-major order for local recoding, attributes for
// global recoding). That assignment is minimal: lowering any single cell
// (attribute) would produce a lexicographically smaller k-anonymous one.
GeneralizationResult MinimalGeneralization(const MicrodataTable& table,
                                           const HierarchyMap& hierarchies, int k,
                                           Recoding recoding = Recoding::kLocal,
                                           double max_states = 1e6);

// Whether `levels` (row-major over the QI cells of `table`) is k-anonymous
// and no single cell can be lowered while keeping it so.
bool IsMinimalLocalScheme(const MicrodataTable& table, const HierarchyMap& hierarchies,
                          std::span<const std::string> qi_attributes,
                          const std::vector<std::vector<int>>& levels, int k);

// z-scored numeric QI block plus integer codes for categorical QIs.
struct QiMatrix {
  Eigen::MatrixXd numeric;     // rows x numeric QIs, standardized
  Eigen::MatrixXi categorical; // rows x categorical QIs
  Eigen::VectorXd mean;        // raw means of the numeric QIs
  Eigen::VectorXd scale;       // raw std devs (1 where constant)
  std::vector<std::size_t> numeric_columns;
  std::vector<std::size_t> categorical_columns;
  std::vector<std::vector<std::string>> categories;  // code -> text
};
QiMatrix BuildQiMatrix(const MicrodataTable& table, std::span<const std::size_t> qi_columns);

// MDAV partition of the rows into groups of size in [k, 2k - 1]. Ties in
// every argmax/argmin go to the lowest row id.
Partition MdavPartition(const MicrodataTable& table, std::span<const std::string> qi_attributes,
                        int k);

struct MicroaggregationResult {
  Partition partition;
  AnonymizedRelease release;
};

// MDAV groups; numeric QIs replaced by the group mean, categorical QIs by
// the group mode (ties: smallest text).
MicroaggregationResult MdavMicroaggregate(const MicrodataTable& table,
                                          std::span<const std::string> qi_attributes, int k);

// Same aggregation over a given partition (e.g. one refined for l or t).
MicroaggregationResult Microaggregate(const MicrodataTable& table,
                                      std::span<const std::string> qi_attributes,
                                      const Partition& partition, int k);

struct SseResult {
  double raw = 0.0;
  double standardized = 0.0;
};

// Squared error between original and masked QI cells, matched by row id.
// Numeric differences are squared (standardized by the original column's
// population std for `standardized`); categorical cells add 1 per mismatch.
// Generalized numeric cells count at their interval midpoint.
SseResult Sse(const MicrodataTable& table, const MicrodataTable& release,
              std::span<const std::string> qi_attributes);

// Numeric reading of a released cell: the number itself, the midpoint of an
// "[lo,hi]" label, or `fallback` otherwise.
double MaskedNumericValue(const Cell& cell, double fallback);

}  // namespace sdc

#endif  // SDC_KANON_H_
