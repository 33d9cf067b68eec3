#ifndef SDC_PIPELINE_H_
#define SDC_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "sdc/hierarchy.h"
#include "sdc/ledger.h"
#include "sdc/release.h"
#include "sdc/table.h"
#include "sdc/utility.h"

namespace sdc {

// Mechanisms the pipeline can run.
inline const std::vector<std::string> kMechanisms = {
    "generalization", "minimal_generalization", "mdav",
    "cluster_and_permute", "anatomy", "dp_microdata"};

// Attacks the pipeline can run against a release.
inline const std::vector<std::string> kAttacks = {
    "linkage", "attribute_inference", "downcoding", "dp_check"};

struct RunConfig {
  std::string input;        // CSV
  std::string schema;       // schema sidecar JSON
  std::string hierarchies;  // JSON array of hierarchies (generalization only)
  std::string external;     // intruder's table; defaults to the input
  std::string mechanism = "mdav";
  PrivacyParams params;
  std::vector<std::string> qi_attributes;  // defaults to the schema's QIs
  std::string conf_attribute;              // defaults to the first confidential one
  double max_suppression = 0.0;
  std::string recoding = "local";
  std::string permutation = "vector";
  std::vector<std::string> attacks = {"linkage"};
  int trials = 1000;
  int dp_check_trials = 20000;
  std::uint64_t seed = 0;
  std::string out_dir = "run";

  nlohmann::json ToJson() const;
  // Unknown keys throw kInvalidArgument so typos do not pass silently.
  static RunConfig FromJson(const nlohmann::json& doc);
  // Parameter ranges, mechanism and attack names, input files present.
  void Validate() const;
};

HierarchyMap LoadHierarchies(const std::string& path);

// Runs the mechanism only. Anatomy is not representable as one table and
// throws kInvalidArgument here; see Run.
AnonymizedRelease Anonymize(const MicrodataTable& table, const RunConfig& config,
                            const HierarchyMap& hierarchies, std::uint64_t seed);

struct RunResult {
  nlohmann::json provenance;
  nlohmann::json attacks = nlohmann::json::object();
  nlohmann::json utility;
  EffectiveBudget budget;
  std::string summary;
};

// anonymize -> attack -> account -> report. Writes under config.out_dir:
// config.json, release.csv (qi.csv + conf.csv for anatomy), provenance.json,
// private/row_ids.json, attacks/<name>.json, utility.json, ledger.jsonl,
// summary.txt and manifest.json. Output bytes depend only on the config and
// the input bytes.
RunResult Run(const RunConfig& config);

// Runs one attack against a release already on disk and refreshes the run
// directory's summary and manifest.
nlohmann::json AttackRunDirectory(const std::string& run_dir, const std::string& attack,
                                  int trials, std::uint64_t seed,
                                  const std::string& external = {});

// Rebuilds summary.txt from the artifacts of a run directory.
std::string ReportRunDirectory(const std::string& run_dir);

// Human-readable comparison of the ex-ante guarantee with the measured
// (ex-post) risk.
std::string Summarize(const nlohmann::json& provenance, const nlohmann::json& attacks,
                      const nlohmann::json& utility, const EffectiveBudget& budget);

// manifest.json listing every file under `dir` (except itself) with its
// SHA-256, in path order.
void WriteManifest(const std::string& dir, const nlohmann::json& inputs);

struct SweepPoint {
  std::string parameter;
  double value = 0.0;
  double linkage_rate = 0.0;
  double linkage_upper = 0.0;
  double sse_standardized = 0.0;
  double max_marginal_distance = 0.0;
};

// One Run per value of k (k-family mechanisms) or epsilon (dp_microdata),
// in <out_dir>/<parameter>=<value>/, plus <out_dir>/sweep.csv.
std::vector<SweepPoint> Sweep(const RunConfig& config, const std::vector<double>& values);

}  // namespace sdc

#endif  // SDC_PIPELINE_H_
