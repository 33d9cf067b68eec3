#ifndef SDC_ATTACKS_H_
#define SDC_ATTACKS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nlohmann/json.hpp"
#include "sdc/dp.h"
#include "sdc/hierarchy.h"
#include "sdc/release.h"
#include "sdc/rng.h"
#include "sdc/stats.h"
#include "sdc/table.h"

namespace sdc {

// Nearest-neighbour record linkage over the QIs shared by the release and
// the intruder's external table. Numeric QIs are z-scored with the external
// table's population std; categorical QIs and generalized labels add 0 when
// they match (a label matches every value it covers) and 1 otherwise.
// Exact distance ties are broken uniformly at random.
struct LinkageStrategy {
  // Attributes to link on; empty means every release QI also present in the
  // external table.
  std::vector<std::string> qi_attributes;
  // Optional hierarchies used to decide whether a label covers a value.
  const HierarchyMap* hierarchies = nullptr;
};

struct AttackReport {
  std::string attack;
  // Empirical success rate of each external record over the trials.
  std::vector<double> per_record_success;
  std::uint64_t successes = 0;
  std::uint64_t attempts = 0;
  double rate = 0.0;
  ConfidenceInterval interval;
  int trials = 0;
  std::uint64_t seed = 0;

  nlohmann::json ToJson() const;
};

// Re-runs a randomized mechanism with the given seed.
using ReleaseFactory = std::function<AnonymizedRelease(std::uint64_t seed)>;

// Ground truth: an external record matches the released row with the same
// row id. Records without a counterpart always count as failures.
AttackReport LinkageAttack(const AnonymizedRelease& release, const MicrodataTable& external,
                           const LinkageStrategy& strategy, int trials, std::uint64_t seed);
// Re-randomizes the mechanism on every trial.
AttackReport LinkageAttack(const ReleaseFactory& mechanism, const MicrodataTable& external,
                           const LinkageStrategy& strategy, int trials, std::uint64_t seed);

// Attribute inference against located classes: posterior = class
// distribution of the confidential attribute, gain = posterior - prior.
struct ClassInference {
  std::size_t class_index = 0;
  std::size_t size = 0;
  std::map<std::string, double> posterior;
  std::map<std::string, double> gain;
  double max_gain = 0.0;
  std::string max_gain_value;
  bool flagged = false;
};

struct AttributeInferenceReport {
  std::string attribute;
  std::map<std::string, double> prior;
  std::vector<ClassInference> classes;
  double max_gain = 0.0;
  std::size_t flagged_classes = 0;

  nlohmann::json ToJson() const;
};

AttributeInferenceReport AttributeInference(const MicrodataTable& release,
                                            const Partition& partition,
                                            const std::string& conf_attribute,
                                            const std::map<std::string, double>& global_distribution,
                                            double gain_threshold = 0.25);

// Empirical distribution of a column, keyed by cell text.
std::map<std::string, double> ColumnDistribution(const MicrodataTable& table,
                                                 const std::string& attribute);

struct MembershipReport {
  double advantage = 0.0;      // max(0, 2 * (accuracy - 1/2))
  double raw_advantage = 0.0;  // 2 * (accuracy - 1/2), may be negative
  double accuracy = 0.0;
  ConfidenceInterval accuracy_interval;
  int trials = 0;
  int calibration_runs = 0;
  std::uint64_t seed = 0;

  nlohmann::json ToJson() const;
};

// Likelihood-ratio distinguisher: output densities of both worlds are
// estimated by histograms over `calibration_runs` runs each (bins over the
// central 99% of the pooled outputs); every trial
// flips membership uniformly, runs the mechanism, and guesses the world with
// the higher estimated density (coin flip on ties).
MembershipReport MembershipInference(const ScalarMechanism& mechanism,
                                     const MicrodataTable& table_with_target,
                                     const MicrodataTable& table_without_target, int trials,
                                     std::uint64_t seed, int calibration_runs = 10000,
                                     int bins = 64);

struct IntersectionReport {
  // Smallest |class1 ∩ class2| over shared individuals; 0 when vacuous.
  std::size_t min_effective_anonymity = 0;
  // Keyed by the individual's row id in the first release.
  std::map<RowId, std::size_t> effective_anonymity;
  // effective anonymity -> number of individuals.
  std::map<std::size_t, std::size_t> distribution;
  bool vacuous = true;

  nlohmann::json ToJson() const;
};

// `shared` pairs the row id of an individual in release1 with its row id in
// release2. Candidates for a target are the shared individuals lying in
// both of the target's classes.
IntersectionReport IntersectionAttack(const AnonymizedRelease& release1,
                                      const AnonymizedRelease& release2,
                                      const std::vector<std::pair<RowId, RowId>>& shared);

struct CellInference {
  std::size_t row = 0;  // position in the released table
  std::string attribute;
  std::string released;
  std::vector<std::string> inferred;
  std::size_t leaf_count = 0;
};

struct DowncodingReport {
  std::vector<CellInference> cells;  // generalized cells only
  double recovery_score = 0.0;
  std::uint64_t candidates = 0;
  std::uint64_t preimages = 0;

  nlohmann::json ToJson() const;
};

// Enumerates every original table consistent with the released labels and
// keeps those for which the release is a minimal k-anonymous generalization
// (any minimal scheme, not only the mechanism's tie-break). Inferred sets
// are the values each generalized cell takes across those preimages.
DowncodingReport DowncodingAttack(const AnonymizedRelease& release,
                                  const HierarchyMap& hierarchies, int k,
                                  double max_candidates = 1e6);

}  // namespace sdc

#endif  // SDC_ATTACKS_H_
