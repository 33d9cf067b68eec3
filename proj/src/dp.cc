#include "sdc/dp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdc/error.h"
#include "sdc/stats.h"

namespace sdc {

namespace {

const char* const kOpNames[] = {"==", "!=", "<", "<=", ">", ">="};
const char* const kKindNames[] = {"count", "sum", "mean", "max", "identity"};

void RequirePositiveEpsilon(double epsilon) {
  if (!(epsilon > 0)) throw Error(ErrorCode::kNonPositiveEpsilon, "epsilon must be positive");
}

void RequireDelta(double delta) {
  if (!(delta > 0 && delta < 1)) throw Error(ErrorCode::kInvalidDelta, "delta must lie in (0, 1)");
}

const AttributeSchema& NumericAttribute(const Schema& schema, const std::string& name) {
  for (const AttributeSchema& a : schema) {
    if (a.name != name) continue;
    if (a.kind != Kind::kNumeric) {
      throw Error(ErrorCode::kNonNumeric, "'" + name + "' is not numeric");
    }
    return a;
  }
  throw Error(ErrorCode::kUnknownAttribute, "'" + name + "'");
}

const AttributeSchema& BoundedAttribute(const Schema& schema, const std::string& name) {
  const AttributeSchema& a = NumericAttribute(schema, name);
  if (!a.HasFiniteDomain()) {
    throw Error(ErrorCode::kUnboundedDomain, "'" + name + "' has no finite domain");
  }
  return a;
}

std::size_t RequirePublicN(const Query& q) {
  if (!q.public_n || *q.public_n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "mean query needs a positive public n");
  }
  return *q.public_n;
}

std::vector<double> Column(const MicrodataTable& table, const std::string& attribute) {
  const std::size_t j = table.AttributeIndex(attribute);
  std::vector<double> out;
  for (std::size_t i = 0; i < table.num_rows(); ++i) out.push_back(table.number(i, j));
  return out;
}

}  // namespace

bool Predicate::Matches(const MicrodataTable& table, std::size_t row) const {
  const Cell& cell = table.cell(row, table.AttributeIndex(attribute));
  const auto compare = [&](const auto& x, const auto& y) {
    switch (op) {
      case Op::kEq: return x == y;
      case Op::kNe: return x != y;
      case Op::kLt: return x < y;
      case Op::kLe: return x <= y;
      case Op::kGt: return x > y;
      case Op::kGe: return x >= y;
    }
    return false;
  };
  if (IsNumeric(cell) && IsNumeric(value)) return compare(std::get<double>(cell), std::get<double>(value));
  return compare(CellText(cell), CellText(value));
}

Query Query::Count(std::optional<Predicate> predicate) {
  Query q;
  q.kind = QueryKind::kCount;
  q.predicate = std::move(predicate);
  return q;
}

Query Query::Sum(std::string attribute) {
  Query q;
  q.kind = QueryKind::kSum;
  q.attribute = std::move(attribute);
  return q;
}

Query Query::Mean(std::string attribute, std::size_t public_n) {
  Query q;
  q.kind = QueryKind::kMean;
  q.attribute = std::move(attribute);
  q.public_n = public_n;
  return q;
}

Query Query::Max(std::string attribute) {
  Query q;
  q.kind = QueryKind::kMax;
  q.attribute = std::move(attribute);
  return q;
}

Query Query::Identity(std::size_t row, std::string attribute) {
  Query q;
  q.kind = QueryKind::kIdentity;
  q.row = row;
  q.attribute = std::move(attribute);
  return q;
}

nlohmann::json Query::ToJson() const {
  nlohmann::json doc;
  doc["kind"] = kKindNames[static_cast<int>(kind)];
  if (!attribute.empty()) doc["attribute"] = attribute;
  if (predicate) {
    nlohmann::json value;
    if (IsNumeric(predicate->value)) {
      value = std::get<double>(predicate->value);
    } else {
      value = std::get<std::string>(predicate->value);
    }
    doc["predicate"] = {{"attribute", predicate->attribute},
                        {"op", kOpNames[static_cast<int>(predicate->op)]},
                        {"value", value}};
  }
  if (kind == QueryKind::kIdentity) doc["row"] = row;
  if (public_n) doc["public_n"] = *public_n;
  if (public_max_rows) doc["public_max_rows"] = *public_max_rows;
  return doc;
}

Query Query::FromJson(const nlohmann::json& doc) {
  Query q;
  const std::string kind = doc.at("kind").get<std::string>();
  const auto* k = std::find(std::begin(kKindNames), std::end(kKindNames), kind);
  if (k == std::end(kKindNames)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown query kind '" + kind + "'");
  }
  q.kind = static_cast<QueryKind>(k - std::begin(kKindNames));
  q.attribute = doc.value("attribute", "");
  if (doc.contains("predicate")) {
    const auto& p = doc["predicate"];
    Predicate pred;
    pred.attribute = p.at("attribute").get<std::string>();
    const std::string op = p.value("op", "==");
    const auto* o = std::find(std::begin(kOpNames), std::end(kOpNames), op);
    if (o == std::end(kOpNames)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown predicate operator '" + op + "'");
    }
    pred.op = static_cast<Predicate::Op>(o - std::begin(kOpNames));
    const auto& v = p.at("value");
    pred.value = v.is_number() ? Cell(v.get<double>()) : Cell(NormalizeNfc(v.get<std::string>()));
    q.predicate = std::move(pred);
  }
  q.row = doc.value("row", std::size_t{0});
  if (doc.contains("public_n")) q.public_n = doc["public_n"].get<std::size_t>();
  if (doc.contains("public_max_rows")) q.public_max_rows = doc["public_max_rows"].get<std::size_t>();
  return q;
}

double EvaluateQuery(const Query& query, const MicrodataTable& table) {
  switch (query.kind) {
    case QueryKind::kCount: {
      double n = 0;
      for (std::size_t i = 0; i < table.num_rows(); ++i) {
        if (!query.predicate || query.predicate->Matches(table, i)) n += 1;
      }
      return n;
    }
    case QueryKind::kSum:
    case QueryKind::kMean: {
      const std::vector<double> x = Column(table, query.attribute);
      double s = 0;
      for (double v : x) s += v;
      if (query.kind == QueryKind::kSum) return s;
      if (x.empty()) throw Error(ErrorCode::kTooFewRows, "mean of an empty table");
      return s / static_cast<double>(x.size());
    }
    case QueryKind::kMax: {
      const std::vector<double> x = Column(table, query.attribute);
      if (x.empty()) throw Error(ErrorCode::kTooFewRows, "max of an empty table");
      return *std::max_element(x.begin(), x.end());
    }
    case QueryKind::kIdentity:
      if (query.row >= table.num_rows()) {
        throw Error(ErrorCode::kInvalidArgument, "row " + std::to_string(query.row) + " out of range");
      }
      return table.number(query.row, table.AttributeIndex(query.attribute));
  }
  return 0;
}

void DpParams::Validate() const {
  if (!(epsilon >= 0)) throw Error(ErrorCode::kNonPositiveEpsilon, "epsilon must be >= 0");
  if (!(delta >= 0 && delta < 1)) throw Error(ErrorCode::kInvalidDelta, "delta must lie in [0, 1)");
}

double GlobalSensitivity(const Query& query, const Schema& schema, NeighborModel model) {
  if (query.kind == QueryKind::kCount) return 1.0;
  const AttributeSchema& a = BoundedAttribute(schema, query.attribute);
  switch (query.kind) {
    case QueryKind::kSum:
      return model == NeighborModel::kAddRemove ? std::max(std::abs(a.min), std::abs(a.max))
                                                : a.max - a.min;
    case QueryKind::kMean:
      // The denominator is the public n, so the mean moves like the sum.
      return (model == NeighborModel::kAddRemove ? std::max(std::abs(a.min), std::abs(a.max))
                                                 : a.max - a.min) /
             static_cast<double>(RequirePublicN(query));
    default:
      return a.max - a.min;
  }
}

double IndividualSensitivity(const Query& query, const MicrodataTable& table,
                             NeighborModel model) {
  if (query.kind == QueryKind::kCount) return 1.0;
  const AttributeSchema& a = BoundedAttribute(table.schema(), query.attribute);
  const std::vector<double> x = Column(table, query.attribute);
  if (x.empty()) return 0.0;
  // Largest move of one actual value to the far end of the domain.
  auto spread = [&](double v) { return std::max(v - a.min, a.max - v); };
  double widest = 0.0;
  double largest = 0.0;
  for (double v : x) {
    widest = std::max(widest, spread(v));
    largest = std::max(largest, std::abs(v));
  }
  switch (query.kind) {
    case QueryKind::kSum:
      return model == NeighborModel::kAddRemove ? largest : widest;
    case QueryKind::kMean:
      return (model == NeighborModel::kAddRemove ? largest : widest) /
             static_cast<double>(RequirePublicN(query));
    case QueryKind::kIdentity:
      if (query.row >= x.size()) {
        throw Error(ErrorCode::kInvalidArgument, "row " + std::to_string(query.row) + " out of range");
      }
      return spread(x[query.row]);
    case QueryKind::kMax: {
      std::vector<double> sorted = x;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      const double second = sorted.size() > 1 ? sorted[1] : a.min;
      if (model == NeighborModel::kAddRemove) return sorted[0] - second;
      // Replacing the maximum can lower it to max(lo, second) or any record
      // can be raised to hi.
      return std::max(a.max - sorted[0], sorted[0] - std::max(a.min, second));
    }
    default:
      return 0.0;
  }
}

double LaplaceMechanism(double true_answer, double sensitivity, double epsilon, Rng& rng) {
  RequirePositiveEpsilon(epsilon);
  if (!(sensitivity >= 0)) throw Error(ErrorCode::kInvalidArgument, "sensitivity must be >= 0");
  if (sensitivity == 0) return true_answer;
  return true_answer + rng.Laplace(sensitivity / epsilon);
}

std::pair<double, double> QueryOutputRange(const Query& query, const Schema& schema) {
  if (query.kind == QueryKind::kCount || query.kind == QueryKind::kSum) {
    if (!query.public_max_rows) {
      throw Error(ErrorCode::kUnboundedDomain, "output range needs a public bound on the row count");
    }
    const double n = static_cast<double>(*query.public_max_rows);
    if (query.kind == QueryKind::kCount) return {0.0, n};
    const AttributeSchema& a = BoundedAttribute(schema, query.attribute);
    return {std::min(0.0, n * a.min), std::max(0.0, n * a.max)};
  }
  const AttributeSchema& a = BoundedAttribute(schema, query.attribute);
  return {a.min, a.max};
}

double PerfectSecrecyMechanism(const Query& query, const Schema& schema, Rng& rng) {
  const auto [lo, hi] = QueryOutputRange(query, schema);
  if (query.kind == QueryKind::kCount) {
    return static_cast<double>(rng.UniformIndex(static_cast<std::uint64_t>(hi) + 1));
  }
  return rng.Uniform(lo, hi);
}

AnonymizedRelease DpMicrodataRelease(const MicrodataTable& table, double epsilon,
                                     std::uint64_t seed) {
  RequirePositiveEpsilon(epsilon);
  const MicrodataTable released = SuppressIdentifiers(table);
  for (const AttributeSchema& a : released.schema()) {
    if (a.kind != Kind::kNumeric) {
      throw Error(ErrorCode::kNonNumeric, "'" + a.name + "' is not numeric");
    }
    if (!a.HasFiniteDomain()) {
      throw Error(ErrorCode::kUnboundedDomain, "'" + a.name + "' has no finite domain");
    }
  }
  const std::size_t m = released.num_attributes();
  const double eps_cell = m > 0 ? epsilon / static_cast<double>(m) : epsilon;
  Rng rng(seed);
  std::vector<std::vector<Cell>> rows = released.rows();
  for (auto& row : rows) {
    for (std::size_t j = 0; j < m; ++j) {
      const AttributeSchema& a = released.attribute(j);
      const double noisy = LaplaceMechanism(std::get<double>(row[j]), a.Width(), eps_cell, rng);
      row[j] = std::clamp(noisy, a.min, a.max);
    }
  }
  AnonymizedRelease out;
  out.table = released.WithRows(std::move(rows));
  out.provenance.mechanism = "dp_microdata";
  out.provenance.params.epsilon = epsilon;
  out.provenance.seed = seed;
  out.provenance.details["epsilon_per_cell"] = eps_cell;
  out.provenance.details["budget_split"] = "uniform over attributes";
  out.provenance.details["neighbor_model"] = "replace";
  return out;
}

double MetricDpMechanism(double x, double epsilon, Rng& rng) {
  RequirePositiveEpsilon(epsilon);
  return x + rng.Laplace(1.0 / epsilon);
}

Eigen::Vector2d MetricDpMechanism(const Eigen::Vector2d& x, double epsilon, Rng& rng) {
  RequirePositiveEpsilon(epsilon);
  const double theta = 2.0 * std::numbers::pi * rng.Uniform01();
  const double r = rng.Exponential(1.0 / epsilon) + rng.Exponential(1.0 / epsilon);
  return x + r * Eigen::Vector2d(std::cos(theta), std::sin(theta));
}

double RdpToDp(double alpha, double eps_rdp, double delta) {
  if (!(alpha > 1)) throw Error(ErrorCode::kInvalidAlpha, "alpha must exceed 1");
  RequireDelta(delta);
  if (std::isinf(alpha)) return eps_rdp;
  return eps_rdp + std::log(1.0 / delta) / (alpha - 1.0);
}

double ZcdpToDp(double rho, double delta) {
  if (!(rho > 0)) throw Error(ErrorCode::kInvalidRho, "rho must be positive");
  RequireDelta(delta);
  return rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta));
}

nlohmann::json EmpiricalDpResult::ToJson() const {
  return {{"max_log_ratio", std::isfinite(max_log_ratio) ? nlohmann::json(max_log_ratio)
                                                         : nlohmann::json("inf")},
          {"slack", slack},
          {"critical_z", critical_z},
          {"bins_considered", bins_considered},
          {"verdict", pass ? "PASS" : "FAIL"}};
}

EmpiricalDpResult CheckLogRatio(std::span<const double> a, std::span<const double> b,
                                double epsilon, int bins, int min_joint_count, double alpha) {
  const LogRatioBins cmp = CompareHistograms(a, b, bins, min_joint_count);
  EmpiricalDpResult out;
  out.bins_considered = static_cast<int>(cmp.log_ratio.size());
  out.pass = true;
  if (out.bins_considered == 0) return out;
  out.critical_z = NormalUpperQuantile(alpha / out.bins_considered);
  out.max_log_ratio = -1.0;
  for (std::size_t i = 0; i < cmp.log_ratio.size(); ++i) {
    const double slack = out.critical_z * cmp.std_error[i];
    if (cmp.log_ratio[i] > out.max_log_ratio) {
      out.max_log_ratio = cmp.log_ratio[i];
      out.slack = slack;
    }
    if (!(cmp.log_ratio[i] <= epsilon + slack)) out.pass = false;
  }
  return out;
}

EmpiricalDpResult EmpiricalDpCheck(const ScalarMechanism& mechanism, const MicrodataTable& table1,
                                   const MicrodataTable& table2, double epsilon, int bins,
                                   int trials, std::uint64_t seed, NeighborModel model) {
  if (!AreNeighbors(table1, table2, model)) {
    throw Error(ErrorCode::kNotNeighbors, "tables are not neighbors under " +
                                              std::string(NeighborModelName(model)));
  }
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be positive");
  const Rng root(seed);
  Rng r1 = root.Fork(0);
  Rng r2 = root.Fork(1);
  std::vector<double> a(static_cast<std::size_t>(trials));
  std::vector<double> b(static_cast<std::size_t>(trials));
  for (double& y : a) y = mechanism(table1, r1);
  for (double& y : b) y = mechanism(table2, r2);
  return CheckLogRatio(a, b, epsilon, bins);
}

}  // namespace sdc
