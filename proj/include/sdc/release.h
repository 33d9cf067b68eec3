#ifndef SDC_RELEASE_H_
#define SDC_RELEASE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "sdc/table.h"

namespace sdc {

// Parameters of the privacy models. Unset fields are not part of the model
// a mechanism enforces.
struct PrivacyParams {
  std::optional<int> k;
  std::optional<double> l;
  std::optional<std::string> l_variant;  // "distinct" | "entropy"
  std::optional<double> t;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> alpha;
  std::optional<double> rho;

  // Throws kInvalidArgument for out-of-range values: k >= 1, l >= 1,
  // t in [0, 1], epsilon >= 0, delta in [0, 1), alpha > 1, rho > 0.
  void Validate() const;

  nlohmann::json ToJson() const;
  static PrivacyParams FromJson(const nlohmann::json& doc);
};

// Anonymous classes as groups of row ids.
struct Partition {
  std::vector<std::vector<RowId>> groups;

  std::size_t size() const { return groups.size(); }
  // row id -> group index; throws kInvalidArgument if groups overlap.
  std::map<RowId, std::size_t> GroupIndex() const;
  std::vector<std::size_t> GroupSizes() const;
};

struct Provenance {
  std::string mechanism;
  PrivacyParams params;
  std::uint64_t seed = 0;
  // Mechanism-specific details (generalization scheme, budget split, ...).
  nlohmann::json details = nlohmann::json::object();
};

struct AnonymizedRelease {
  MicrodataTable table;
  std::optional<Partition> partition;
  Provenance provenance;
};

// Checks the release invariants: no identifier columns, and a partition (if
// present) made of disjoint groups covering exactly the released rows.
void ValidateRelease(const AnonymizedRelease& release);

// Provenance sidecar. The partition is written as row positions of the
// released CSV, never as internal row ids.
nlohmann::json ProvenanceToJson(const AnonymizedRelease& release);

// Rebuilds a release from its CSV and sidecar. Row ids become CSV positions
// unless `row_ids` (the owner's private mapping) is given.
AnonymizedRelease ReleaseFromFiles(std::string_view csv, const nlohmann::json& provenance,
                                   const std::vector<RowId>* row_ids = nullptr);

std::string Sha256Hex(std::string_view bytes);

}  // namespace sdc

#endif  // SDC_RELEASE_H_
