#ifndef SDC_LEDGER_H_
#define SDC_LEDGER_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlohmann/json.hpp"

namespace sdc {

// Above this the guarantee needs empirical confirmation of protection.
inline constexpr double kEmpiricalCheckEpsilon = 1.0;
// Above this the guarantee says almost nothing.
inline constexpr double kVoidEpsilon = 10.0;

struct LedgerEntry {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
  // Entries sharing a group touch disjoint records (parallel composition);
  // none means sequential composition with everything else.
  std::optional<std::string> disjoint_group;
  // "dp" or "k_anonymity"; composition is undefined for the latter.
  std::string model = "dp";

  nlohmann::json ToJson() const;
  static LedgerEntry FromJson(const nlohmann::json& doc);
};

struct EffectiveBudget {
  bool defined = true;
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<std::string> warnings;

  nlohmann::json ToJson() const;
};

// Append-only record of released mechanisms. Single writer.
class BudgetLedger {
 public:
  void Append(LedgerEntry entry);
  const std::vector<LedgerEntry>& entries() const { return entries_; }

  // Sequential entries add; each disjoint group contributes its maximum.
  EffectiveBudget Effective() const;

  std::string ToJsonLines() const;
  static BudgetLedger FromJsonLines(std::string_view text);

 private:
  std::vector<LedgerEntry> entries_;
};

struct Composition {
  BudgetLedger ledger;
  EffectiveBudget effective;
};

Composition Compose(BudgetLedger ledger, LedgerEntry entry);

}  // namespace sdc

#endif  // SDC_LEDGER_H_
