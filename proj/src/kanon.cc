#include "sdc/kanon.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>

#include "sdc/error.h"

namespace sdc {

namespace {

std::vector<std::string> QiKey(const MicrodataTable& t, std::size_t row,
                               std::span<const std::size_t> cols) {
  std::vector<std::string> key;
  key.reserve(cols.size());
  for (std::size_t j : cols) key.push_back(CellText(t.cell(row, j)));
  return key;
}

std::vector<std::size_t> RequireQis(const MicrodataTable& t, std::span<const std::string> qis) {
  if (qis.empty()) throw Error(ErrorCode::kInvalidArgument, "no quasi-identifier attributes");
  return t.AttributeIndices(qis);
}

// Interned generalization labels: ids[a][level][row] with ids unique per
// attribute, so equal ids mean equal released text.
struct LabelTable {
  std::vector<std::vector<std::vector<int>>> ids;
  std::vector<std::vector<std::string>> texts;  // per attribute, id -> label
  std::vector<int> heights;
};

LabelTable BuildLabels(const MicrodataTable& table, const HierarchyMap& hierarchies,
                       std::span<const std::size_t> cols) {
  LabelTable out;
  for (std::size_t a = 0; a < cols.size(); ++a) {
    const std::string& name = table.attribute(cols[a]).name;
    auto it = hierarchies.find(name);
    if (it == hierarchies.end()) {
      throw Error(ErrorCode::kHierarchyMissing, "no hierarchy for quasi-identifier " + name);
    }
    const GeneralizationHierarchy& h = it->second;
    std::unordered_map<std::string, int> intern;
    std::vector<std::string> texts;
    std::vector<std::vector<int>> per_level(static_cast<std::size_t>(h.height() + 1),
                                            std::vector<int>(table.num_rows()));
    for (int level = 0; level <= h.height(); ++level) {
      for (std::size_t i = 0; i < table.num_rows(); ++i) {
        std::string label = h.Generalize(table.cell(i, cols[a]), level);
        auto [pos, inserted] = intern.emplace(label, static_cast<int>(texts.size()));
        if (inserted) texts.push_back(std::move(label));
        per_level[static_cast<std::size_t>(level)][i] = pos->second;
      }
    }
    out.ids.push_back(std::move(per_level));
    out.texts.push_back(std::move(texts));
    out.heights.push_back(h.height());
  }
  return out;
}

// Sizes of the classes each row falls in, for a full level assignment.
template <typename LevelFn>
std::vector<std::size_t> ClassSizes(const LabelTable& labels, std::size_t n,
                                    const std::vector<bool>& active, LevelFn level_of) {
  const std::size_t q = labels.ids.size();
  std::map<std::vector<int>, std::size_t> counts;
  std::vector<std::vector<int>> keys(n, std::vector<int>(q));
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    for (std::size_t a = 0; a < q; ++a) {
      keys[i][a] = labels.ids[a][static_cast<std::size_t>(level_of(i, a))][i];
    }
    ++counts[keys[i]];
  }
  std::vector<std::size_t> sizes(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) sizes[i] = counts[keys[i]];
  }
  return sizes;
}

std::size_t CountViolators(const std::vector<std::size_t>& sizes, const std::vector<bool>& active,
                           int k) {
  std::size_t v = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (active[i] && sizes[i] < static_cast<std::size_t>(k)) ++v;
  }
  return v;
}

}  // namespace

KAnonymityCheck VerifyKAnonymity(const MicrodataTable& release,
                                 std::span<const std::string> qi_attributes, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const std::vector<std::size_t> cols = RequireQis(release, qi_attributes);
  KAnonymityCheck out;
  for (std::size_t i = 0; i < release.num_rows(); ++i) ++out.multiplicity[QiKey(release, i, cols)];
  out.satisfied = true;
  for (const auto& [key, count] : out.multiplicity) {
    if (count < static_cast<std::size_t>(k)) {
      out.satisfied = false;
      out.violating_rows += count;
    }
  }
  return out;
}

Partition EquivalenceClasses(const MicrodataTable& table,
                             std::span<const std::string> qi_attributes) {
  const std::vector<std::size_t> cols = RequireQis(table, qi_attributes);
  std::map<std::vector<std::string>, std::size_t> index;
  Partition p;
  for (std::size_t i = 0; i < table.num_rows(); ++i) {
    auto [it, inserted] = index.emplace(QiKey(table, i, cols), p.groups.size());
    if (inserted) p.groups.emplace_back();
    p.groups[it->second].push_back(table.row_id(i));
  }
  return p;
}

nlohmann::json GeneralizationScheme::ToJson() const {
  nlohmann::json doc;
  doc["recoding"] = recoding == Recoding::kGlobal ? "global" : "local";
  doc["attributes"] = attributes;
  if (recoding == Recoding::kGlobal) {
    doc["levels"] = levels;
  } else {
    doc["cell_levels"] = cell_levels;
  }
  doc["suppressed_rows"] = suppressed_rows.size();
  return doc;
}

GeneralizationScheme GeneralizationScheme::FromJson(const nlohmann::json& doc) {
  GeneralizationScheme s;
  s.recoding = doc.at("recoding").get<std::string>() == "global" ? Recoding::kGlobal
                                                                 : Recoding::kLocal;
  s.attributes = doc.at("attributes").get<std::vector<std::string>>();
  if (s.recoding == Recoding::kGlobal) {
    s.levels = doc.at("levels").get<std::vector<int>>();
  } else {
    s.cell_levels = doc.at("cell_levels").get<std::vector<std::vector<int>>>();
  }
  return s;
}

AnonymizedRelease ApplyScheme(const MicrodataTable& table, const HierarchyMap& hierarchies,
                              const GeneralizationScheme& scheme) {
  const std::vector<std::size_t> cols = table.AttributeIndices(scheme.attributes);
  const std::set<RowId> suppressed(scheme.suppressed_rows.begin(), scheme.suppressed_rows.end());

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < table.num_rows(); ++i) {
    if (!suppressed.contains(table.row_id(i))) kept.push_back(i);
  }

  Schema schema = table.schema();
  std::vector<std::vector<Cell>> rows;
  rows.reserve(kept.size());
  for (std::size_t i : kept) rows.push_back(table.rows()[i]);

  for (std::size_t a = 0; a < cols.size(); ++a) {
    const bool generalized = std::any_of(kept.begin(), kept.end(), [&](std::size_t i) {
      return scheme.LevelFor(i, a) > 0;
    });
    if (!generalized) continue;
    auto it = hierarchies.find(scheme.attributes[a]);
    if (it == hierarchies.end()) {
      throw Error(ErrorCode::kHierarchyMissing, "no hierarchy for " + scheme.attributes[a]);
    }
    std::set<std::string> labels;
    for (std::size_t r = 0; r < kept.size(); ++r) {
      std::string label = it->second.Generalize(table.cell(kept[r], cols[a]),
                                                scheme.LevelFor(kept[r], a));
      labels.insert(label);
      rows[r][cols[a]] = std::move(label);
    }
    const AttributeSchema& original = table.attribute(cols[a]);
    schema[cols[a]] = AttributeSchema::Categorical(
        original.name, original.role, std::vector<std::string>(labels.begin(), labels.end()));
  }

  std::vector<RowId> ids;
  for (std::size_t i : kept) ids.push_back(table.row_id(i));
  AnonymizedRelease release;
  release.table = SuppressIdentifiers(MicrodataTable(std::move(schema), std::move(rows), ids));
  release.partition = EquivalenceClasses(release.table, scheme.attributes);
  release.provenance.details["scheme"] = scheme.ToJson();
  release.provenance.details["non_confidential_passthrough"] = true;
  return release;
}

GeneralizationResult AnonymizeGeneralization(const MicrodataTable& table,
                                             const HierarchyMap& hierarchies, int k,
                                             double max_suppression_fraction) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (!(max_suppression_fraction >= 0 && max_suppression_fraction < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "suppression fraction must lie in [0, 1)");
  }
  const std::vector<std::string> qis = table.AttributeNames(Role::kQuasiIdentifier);
  const std::vector<std::size_t> cols = RequireQis(table, qis);
  const LabelTable labels = BuildLabels(table, hierarchies, cols);
  const std::size_t n = table.num_rows();
  const std::size_t allowed =
      static_cast<std::size_t>(std::floor(max_suppression_fraction * static_cast<double>(n)));
  const std::vector<bool> all(n, true);

  std::vector<int> levels(cols.size(), 0);
  auto violators_at = [&](const std::vector<int>& lv) {
    const auto sizes = ClassSizes(labels, n, all, [&](std::size_t, std::size_t a) { return lv[a]; });
    return CountViolators(sizes, all, k);
  };
  auto distinct_at = [&](std::size_t a, int level) {
    const auto& ids = labels.ids[a][static_cast<std::size_t>(level)];
    return std::set<int>(ids.begin(), ids.end()).size();
  };

  std::size_t violators = violators_at(levels);
  while (violators > allowed) {
    std::optional<std::size_t> best;
    std::size_t best_violators = 0;
    std::size_t best_distinct = 0;
    for (std::size_t a = 0; a < cols.size(); ++a) {
      if (levels[a] >= labels.heights[a]) continue;
      std::vector<int> trial = levels;
      ++trial[a];
      const std::size_t v = violators_at(trial);
      const std::size_t d = distinct_at(a, levels[a]);
      if (!best || v < best_violators || (v == best_violators && d < best_distinct)) {
        best = a;
        best_violators = v;
        best_distinct = d;
      }
    }
    if (!best) {
      throw Error(ErrorCode::kUnsatisfiable,
                  std::to_string(violators) + " rows violate k=" + std::to_string(k) +
                      " at full generalization; suppression allows " + std::to_string(allowed));
    }
    ++levels[*best];
    violators = best_violators;
  }

  GeneralizationScheme scheme;
  scheme.recoding = Recoding::kGlobal;
  scheme.attributes = qis;
  scheme.levels = levels;
  const auto sizes = ClassSizes(labels, n, all, [&](std::size_t, std::size_t a) { return levels[a]; });
  for (std::size_t i = 0; i < n; ++i) {
    if (sizes[i] < static_cast<std::size_t>(k)) scheme.suppressed_rows.push_back(table.row_id(i));
  }

  GeneralizationResult out{ApplyScheme(table, hierarchies, scheme), scheme};
  out.release.provenance.mechanism = "generalization";
  out.release.provenance.params.k = k;
  out.release.provenance.details["max_suppression_fraction"] = max_suppression_fraction;
  return out;
}

GeneralizationResult MinimalGeneralization(const MicrodataTable& table,
                                           const HierarchyMap& hierarchies, int k,
                                           Recoding recoding, double max_states) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const std::vector<std::string> qis = table.AttributeNames(Role::kQuasiIdentifier);
  const std::vector<std::size_t> cols = RequireQis(table, qis);
  const LabelTable labels = BuildLabels(table, hierarchies, cols);
  const std::size_t n = table.num_rows();
  const std::size_t q = cols.size();
  const std::vector<bool> all(n, true);

  // Odometer over the digits, first digit most significant.
  const std::size_t digits = recoding == Recoding::kLocal ? n * q : q;
  std::vector<int> radix(digits);
  double states = 1.0;
  for (std::size_t d = 0; d < digits; ++d) {
    radix[d] = labels.heights[d % q] + 1;
    states *= radix[d];
  }
  if (states > max_states) {
    throw Error(ErrorCode::kSearchSpaceTooLarge,
                FormatNumber(states) + " level assignments exceed the limit of " +
                    FormatNumber(max_states));
  }

  std::vector<int> digit(digits, 0);
  auto level_of = [&](std::size_t i, std::size_t a) {
    return recoding == Recoding::kLocal ? digit[i * q + a] : digit[a];
  };
  bool found = false;
  while (n >= static_cast<std::size_t>(k)) {
    if (CountViolators(ClassSizes(labels, n, all, level_of), all, k) == 0) {
      found = true;
      break;
    }
    bool exhausted = true;
    for (std::size_t d = digits; d-- > 0;) {
      if (++digit[d] < radix[d]) {
        exhausted = false;
        break;
      }
      digit[d] = 0;
    }
    if (exhausted) break;
  }
  if (!found) {
    throw Error(ErrorCode::kUnsatisfiable,
                "no level assignment makes " + std::to_string(n) + " rows " +
                    std::to_string(k) + "-anonymous");
  }

  GeneralizationScheme scheme;
  scheme.recoding = recoding;
  scheme.attributes = qis;
  if (recoding == Recoding::kGlobal) {
    scheme.levels = digit;
  } else {
    scheme.cell_levels.assign(n, std::vector<int>(q));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < q; ++a) scheme.cell_levels[i][a] = digit[i * q + a];
    }
  }
  GeneralizationResult out{ApplyScheme(table, hierarchies, scheme), scheme};
  out.release.provenance.mechanism = "minimal_generalization";
  out.release.provenance.params.k = k;
  return out;
}

bool IsMinimalLocalScheme(const MicrodataTable& table, const HierarchyMap& hierarchies,
                          std::span<const std::string> qi_attributes,
                          const std::vector<std::vector<int>>& levels, int k) {
  const std::vector<std::size_t> cols = RequireQis(table, qi_attributes);
  const LabelTable labels = BuildLabels(table, hierarchies, cols);
  const std::size_t n = table.num_rows();
  const std::vector<bool> all(n, true);
  std::vector<std::vector<int>> lv = levels;
  auto anonymous = [&] {
    return CountViolators(ClassSizes(labels, n, all,
                                     [&](std::size_t i, std::size_t a) { return lv[i][a]; }),
                          all, k) == 0;
  };
  if (!anonymous()) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < cols.size(); ++a) {
      const int original = lv[i][a];
      for (int lower = 0; lower < original; ++lower) {
        lv[i][a] = lower;
        if (anonymous()) return false;
      }
      lv[i][a] = original;
    }
  }
  return true;
}

double MaskedNumericValue(const Cell& cell, double fallback) {
  if (const double* d = std::get_if<double>(&cell)) return *d;
  const std::string& s = std::get<std::string>(cell);
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec == std::errc() && end == s.data() + s.size()) return x;
  if (s.size() >= 5 && s.front() == '[' && s.back() == ']') {
    const std::size_t comma = s.find(',');
    double lo = 0.0, hi = 0.0;
    if (comma != std::string::npos) {
      auto r1 = std::from_chars(s.data() + 1, s.data() + comma, lo);
      auto r2 = std::from_chars(s.data() + comma + 1, s.data() + s.size() - 1, hi);
      if (r1.ec == std::errc() && r2.ec == std::errc()) return 0.5 * (lo + hi);
    }
  }
  return fallback;
}

SseResult Sse(const MicrodataTable& table, const MicrodataTable& release,
              std::span<const std::string> qi_attributes) {
  std::map<RowId, std::size_t> original_row;
  for (std::size_t i = 0; i < table.num_rows(); ++i) original_row[table.row_id(i)] = i;
  std::vector<std::size_t> table_cols, release_cols;
  for (const std::string& name : qi_attributes) {
    auto tj = table.FindAttribute(name);
    auto rj = release.FindAttribute(name);
    if (!tj || !rj) throw Error(ErrorCode::kMisaligned, "attribute " + name + " not in both tables");
    table_cols.push_back(*tj);
    release_cols.push_back(*rj);
  }
  SseResult out;
  for (std::size_t a = 0; a < table_cols.size(); ++a) {
    const AttributeSchema& attr = table.attribute(table_cols[a]);
    double mean = 0.0, scale = 1.0;
    if (attr.kind == Kind::kNumeric) {
      const Eigen::VectorXd col = table.NumericColumn(table_cols[a]);
      mean = col.size() > 0 ? col.mean() : 0.0;
      const double var = col.size() > 0 ? (col.array() - mean).square().mean() : 0.0;
      scale = var > 0 ? std::sqrt(var) : 1.0;
    }
    const double fallback = attr.HasFiniteDomain() && attr.kind == Kind::kNumeric
                                ? 0.5 * (attr.min + attr.max)
                                : mean;
    for (std::size_t r = 0; r < release.num_rows(); ++r) {
      auto it = original_row.find(release.row_id(r));
      if (it == original_row.end()) {
        throw Error(ErrorCode::kMisaligned,
                    "released row id " + std::to_string(release.row_id(r)) + " not in the original");
      }
      const Cell& orig = table.cell(it->second, table_cols[a]);
      const Cell& masked = release.cell(r, release_cols[a]);
      if (attr.kind == Kind::kNumeric) {
        const double diff = std::get<double>(orig) - MaskedNumericValue(masked, fallback);
        out.raw += diff * diff;
        out.standardized += diff * diff / (scale * scale);
      } else {
        const double miss = CellText(orig) == CellText(masked) ? 0.0 : 1.0;
        out.raw += miss;
        out.standardized += miss;
      }
    }
  }
  return out;
}

}  // namespace sdc
