#include <algorithm>
#include <map>
#include <set>

#include "sdc/attacks.h"
#include "sdc/error.h"
#include "sdc/kanon.h"

namespace sdc {

namespace {

using Key = std::vector<std::string>;
using Counts = std::map<Key, std::size_t>;

struct GeneralizedCell {
  std::size_t row;
  std::size_t qi;  // index into the QI list
  int level;
  std::vector<std::string> leaves;
  // lower[v][l]: label of leaf v at level l < level; empty when the leaf has
  // no ancestor at some level (then it cannot have produced the label).
  std::vector<std::vector<std::string>> lower;
};

bool Anonymous(const Counts& counts, int k) {
  return std::all_of(counts.begin(), counts.end(),
                     [&](const auto& kv) { return kv.second >= static_cast<std::size_t>(k); });
}

}  // namespace

nlohmann::json DowncodingReport::ToJson() const {
  nlohmann::json cells_json = nlohmann::json::array();
  for (const CellInference& c : cells) {
    cells_json.push_back({{"row", c.row},
                          {"attribute", c.attribute},
                          {"released", c.released},
                          {"inferred", c.inferred},
                          {"leaf_count", c.leaf_count}});
  }
  return {{"attack", "downcoding"},
          {"recovery_score", recovery_score},
          {"candidates", candidates},
          {"preimages", preimages},
          {"cells", std::move(cells_json)}};
}

DowncodingReport DowncodingAttack(const AnonymizedRelease& release,
                                  const HierarchyMap& hierarchies, int k,
                                  double max_candidates) {
  if (release.provenance.mechanism != "minimal_generalization") {
    throw Error(ErrorCode::kNotMinimalMechanism,
                "release was produced by '" + release.provenance.mechanism + "'");
  }
  const MicrodataTable& t = release.table;
  const nlohmann::json& details = release.provenance.details;
  std::vector<std::string> qis = t.AttributeNames(Role::kQuasiIdentifier);
  bool global = false;
  if (details.contains("scheme")) {
    qis = details["scheme"].at("attributes").get<std::vector<std::string>>();
    global = details["scheme"].value("recoding", "local") == "global";
  }
  const std::vector<std::size_t> cols = t.AttributeIndices(qis);
  const std::size_t n = t.num_rows();
  const std::size_t q = cols.size();

  std::vector<Key> keys(n, Key(q));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < q; ++a) keys[i][a] = CellText(t.cell(i, cols[a]));
  }
  Counts counts;
  for (const Key& key : keys) ++counts[key];

  std::vector<GeneralizedCell> cells;
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < q; ++a) {
      auto h = hierarchies.find(qis[a]);
      if (h == hierarchies.end()) continue;
      const auto level = h->second.LevelOf(keys[i][a]);
      if (!level) {
        throw Error(ErrorCode::kUnknownValue,
                    qis[a] + ": '" + keys[i][a] + "' is not a node of the hierarchy");
      }
      if (*level == 0) continue;
      GeneralizedCell c{i, a, *level, h->second.LeavesUnder(keys[i][a]), {}};
      for (const std::string& leaf : c.leaves) {
        std::vector<std::string> labels;
        try {
          if (h->second.Generalize(leaf, *level) != keys[i][a]) throw Error(ErrorCode::kUnknownValue, "");
          for (int l = 0; l < *level; ++l) labels.push_back(h->second.Generalize(leaf, l));
        } catch (const Error&) {
          labels.clear();
        }
        c.lower.push_back(std::move(labels));
      }
      total *= static_cast<double>(c.leaves.size());
      cells.push_back(std::move(c));
    }
  }
  if (total > max_candidates) {
    throw Error(ErrorCode::kSearchSpaceTooLarge,
                FormatNumber(total) + " candidate tables exceed the limit of " +
                    FormatNumber(max_candidates));
  }

  // Local recoding: lowering one cell only moves its row between two
  // classes, so whether that keeps k-anonymity depends on that cell's value
  // alone.
  auto lowering_breaks = [&](const GeneralizedCell& c, const std::string& label) {
    Key moved = keys[c.row];
    moved[c.qi] = label;
    const std::size_t left = counts.at(keys[c.row]) - 1;
    auto it = counts.find(moved);
    const std::size_t joined = (it == counts.end() ? 0 : it->second) + 1;
    return !((left == 0 || left >= static_cast<std::size_t>(k)) &&
             joined >= static_cast<std::size_t>(k));
  };

  // Global recoding: lowering attribute a to level l relabels every cell of a.
  std::vector<std::vector<std::size_t>> cells_of_attribute(q);
  for (std::size_t c = 0; c < cells.size(); ++c) cells_of_attribute[cells[c].qi].push_back(c);
  auto is_global_preimage = [&](const std::vector<std::size_t>& choice) {
    for (std::size_t a = 0; a < q; ++a) {
      const auto& members = cells_of_attribute[a];
      if (members.empty()) continue;
      for (int l = 0; l < cells[members.front()].level; ++l) {
        std::vector<Key> lowered = keys;
        for (std::size_t c : members) {
          lowered[cells[c].row][a] = cells[c].lower[choice[c]][static_cast<std::size_t>(l)];
        }
        Counts lc;
        for (const Key& key : lowered) ++lc[key];
        if (Anonymous(lc, k)) return false;
      }
    }
    return true;
  };

  DowncodingReport report;
  std::vector<std::set<std::size_t>> seen(cells.size());
  std::vector<std::size_t> choice(cells.size(), 0);
  const bool release_anonymous = Anonymous(counts, k);
  while (release_anonymous) {
    ++report.candidates;
    bool preimage = true;
    for (std::size_t c = 0; c < cells.size() && preimage; ++c) {
      const auto& lower = cells[c].lower[choice[c]];
      if (lower.empty()) {
        preimage = false;
        break;
      }
      if (global) continue;
      for (const std::string& label : lower) {
        if (!lowering_breaks(cells[c], label)) {
          preimage = false;
          break;
        }
      }
    }
    if (preimage && global) preimage = is_global_preimage(choice);
    if (preimage) {
      ++report.preimages;
      for (std::size_t c = 0; c < cells.size(); ++c) seen[c].insert(choice[c]);
    }
    std::size_t d = cells.size();
    while (d-- > 0) {
      if (++choice[d] < cells[d].leaves.size()) break;
      choice[d] = 0;
    }
    if (d == static_cast<std::size_t>(-1)) break;
  }

  std::size_t recovered = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellInference inf;
    inf.row = cells[c].row;
    inf.attribute = qis[cells[c].qi];
    inf.released = keys[cells[c].row][cells[c].qi];
    inf.leaf_count = cells[c].leaves.size();
    for (std::size_t v : seen[c]) inf.inferred.push_back(cells[c].leaves[v]);
    if (!inf.inferred.empty() && inf.inferred.size() < inf.leaf_count) ++recovered;
    report.cells.push_back(std::move(inf));
  }
  report.recovery_score =
      cells.empty() ? 0.0 : static_cast<double>(recovered) / static_cast<double>(cells.size());
  return report;
}

}  // namespace sdc
