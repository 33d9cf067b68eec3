#include "sdc/ledger.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sdc/error.h"

namespace sdc {

nlohmann::json LedgerEntry::ToJson() const {
  nlohmann::json doc = {{"mechanism", mechanism},
                        {"epsilon", epsilon},
                        {"delta", delta},
                        {"model", model}};
  doc["disjoint_group"] = disjoint_group ? nlohmann::json(*disjoint_group) : nlohmann::json();
  return doc;
}

LedgerEntry LedgerEntry::FromJson(const nlohmann::json& doc) {
  LedgerEntry e;
  e.mechanism = doc.at("mechanism").get<std::string>();
  e.model = doc.value("model", "dp");
  if (e.model != "dp" && e.model != "k_anonymity") {
    throw Error(ErrorCode::kInvalidArgument, "unknown ledger model '" + e.model + "'");
  }
  if (e.model == "dp") e.epsilon = doc.at("epsilon").get<double>();
  e.delta = doc.value("delta", 0.0);
  if (doc.contains("disjoint_group") && !doc["disjoint_group"].is_null()) {
    e.disjoint_group = doc["disjoint_group"].get<std::string>();
  }
  return e;
}

nlohmann::json EffectiveBudget::ToJson() const {
  nlohmann::json doc;
  if (defined) {
    doc["epsilon"] = epsilon;
    doc["delta"] = delta;
  } else {
    doc["epsilon"] = "undefined";
    doc["delta"] = "undefined";
  }
  doc["warnings"] = warnings;
  return doc;
}

void BudgetLedger::Append(LedgerEntry entry) {
  if (entry.model == "dp") {
    if (!(entry.epsilon >= 0) || std::isinf(entry.epsilon)) {
      throw Error(ErrorCode::kNonPositiveEpsilon, "ledger epsilon must be finite and >= 0");
    }
    if (!(entry.delta >= 0 && entry.delta < 1)) {
      throw Error(ErrorCode::kInvalidDelta, "ledger delta must lie in [0, 1)");
    }
  }
  entries_.push_back(std::move(entry));
}

EffectiveBudget BudgetLedger::Effective() const {
  EffectiveBudget out;
  std::map<std::string, std::pair<double, double>> groups;
  for (const LedgerEntry& e : entries_) {
    if (e.model != "dp") {
      out.defined = false;
      continue;
    }
    if (!e.disjoint_group) {
      out.epsilon += e.epsilon;
      out.delta += e.delta;
      continue;
    }
    auto& [eps, delta] = groups[*e.disjoint_group];
    eps = std::max(eps, e.epsilon);
    delta = std::max(delta, e.delta);
  }
  for (const auto& [name, budget] : groups) {
    out.epsilon += budget.first;
    out.delta += budget.second;
  }
  if (!out.defined) {
    out.epsilon = out.delta = 0.0;
    out.warnings.push_back(
        "composition undefined: k-anonymity releases have no composition rule");
    return out;
  }
  if (out.epsilon > kEmpiricalCheckEpsilon) {
    out.warnings.push_back("epsilon above 1: empirical check required");
  }
  if (out.epsilon > kVoidEpsilon) out.warnings.push_back("guarantee mostly void");
  return out;
}

std::string BudgetLedger::ToJsonLines() const {
  std::string out;
  for (const LedgerEntry& e : entries_) out += e.ToJson().dump() + "\n";
  return out;
}

BudgetLedger BudgetLedger::FromJsonLines(std::string_view text) {
  BudgetLedger ledger;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ledger.Append(LedgerEntry::FromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "ledger line " + std::to_string(number) + ": " + e.what());
    }
  }
  return ledger;
}

Composition Compose(BudgetLedger ledger, LedgerEntry entry) {
  ledger.Append(std::move(entry));
  EffectiveBudget effective = ledger.Effective();
  return {std::move(ledger), std::move(effective)};
}

}  // namespace sdc
