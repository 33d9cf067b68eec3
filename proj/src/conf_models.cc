#include "sdc/conf_models.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "sdc/error.h"
#include "sdc/kanon.h"

namespace sdc {

std::vector<std::string> SupportOf(const MicrodataTable& table, std::size_t column) {
  if (table.attribute(column).kind == Kind::kNumeric) {
    std::set<double> values;
    for (std::size_t i = 0; i < table.num_rows(); ++i) values.insert(table.number(i, column));
    std::vector<std::string> out;
    for (double v : values) out.push_back(FormatNumber(v));
    return out;
  }
  std::set<std::string> values;
  for (std::size_t i = 0; i < table.num_rows(); ++i) values.insert(table.text(i, column));
  return {values.begin(), values.end()};
}

Distribution EmpiricalDistribution(std::span<const Cell> values,
                                   const std::vector<std::string>& support) {
  if (values.empty()) throw Error(ErrorCode::kEmptyClass, "no values");
  std::map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < support.size(); ++i) {
    index[support[i]] = static_cast<Eigen::Index>(i);
  }
  Distribution d{support, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(support.size()))};
  for (const Cell& v : values) {
    auto it = index.find(CellText(v));
    if (it == index.end()) {
      throw Error(ErrorCode::kSupportMismatch, "'" + CellText(v) + "' is not in the support");
    }
    d.mass[it->second] += 1.0;
  }
  d.mass /= static_cast<double>(values.size());
  return d;
}

Eigen::MatrixXd GroundDistanceMatrix(GroundDistance d, std::size_t m) {
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (d == GroundDistance::kCategoricalUniform) {
        out(i, j) = i == j ? 0.0 : 1.0;
      } else {
        out(i, j) = m > 1 ? std::abs(static_cast<double>(i - j)) / static_cast<double>(m - 1) : 0.0;
      }
    }
  }
  return out;
}

double Emd(const Distribution& p, const Distribution& q, GroundDistance d) {
  if (p.support != q.support || p.mass.size() != q.mass.size() ||
      p.mass.size() != static_cast<Eigen::Index>(p.support.size())) {
    throw Error(ErrorCode::kSupportMismatch, "distributions are over different supports");
  }
  if (std::set<std::string>(p.support.begin(), p.support.end()).size() != p.support.size()) {
    throw Error(ErrorCode::kSupportMismatch, "support has duplicates");
  }
  const Eigen::Index m = p.mass.size();
  if (d == GroundDistance::kCategoricalUniform) return 0.5 * (p.mass - q.mass).cwiseAbs().sum();
  if (m < 2) return 0.0;
  double cdf = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    cdf += p.mass[i] - q.mass[i];
    total += std::abs(cdf);
  }
  return total / static_cast<double>(m - 1);
}

double LDiversity(std::span<const Cell> values, LDiversityVariant variant) {
  if (values.empty()) throw Error(ErrorCode::kEmptyClass, "class has no values");
  std::map<std::string, double> counts;
  for (const Cell& v : values) counts[CellText(v)] += 1.0;
  if (variant == LDiversityVariant::kDistinct) return static_cast<double>(counts.size());
  const double n = static_cast<double>(values.size());
  double entropy = 0.0;
  for (const auto& [value, c] : counts) entropy -= (c / n) * std::log(c / n);
  return std::exp(entropy);
}

namespace {

std::vector<std::vector<Cell>> ClassValues(const MicrodataTable& table,
                                           const Partition& partition, std::size_t column) {
  std::map<RowId, std::size_t> position;
  for (std::size_t i = 0; i < table.num_rows(); ++i) position[table.row_id(i)] = i;
  std::vector<std::vector<Cell>> out;
  for (const auto& group : partition.groups) {
    if (group.empty()) throw Error(ErrorCode::kEmptyClass, "partition has an empty class");
    std::vector<Cell> values;
    for (RowId id : group) {
      auto it = position.find(id);
      if (it == position.end()) {
        throw Error(ErrorCode::kMisaligned, "row id " + std::to_string(id) + " not in table");
      }
      values.push_back(table.cell(it->second, column));
    }
    out.push_back(std::move(values));
  }
  return out;
}

std::vector<double> ClassEmds(const MicrodataTable& table,
                              const std::vector<std::vector<Cell>>& classes, std::size_t column,
                              GroundDistance d) {
  const std::vector<std::string> support = SupportOf(table, column);
  std::vector<Cell> all;
  for (std::size_t i = 0; i < table.num_rows(); ++i) all.push_back(table.cell(i, column));
  const Distribution global = EmpiricalDistribution(all, support);
  std::vector<double> out;
  for (const auto& values : classes) {
    out.push_back(Emd(EmpiricalDistribution(values, support), global, d));
  }
  return out;
}

}  // namespace

ClassMeasure VerifyLDiversity(const MicrodataTable& table, const Partition& partition,
                              const std::string& conf_attribute, double l,
                              LDiversityVariant variant) {
  const std::size_t column = table.AttributeIndex(conf_attribute);
  ClassMeasure out;
  out.worst = std::numeric_limits<double>::infinity();
  for (const auto& values : ClassValues(table, partition, column)) {
    out.values.push_back(LDiversity(values, variant));
    out.worst = std::min(out.worst, out.values.back());
  }
  out.satisfied = out.worst >= l;
  return out;
}

ClassMeasure VerifyTCloseness(const MicrodataTable& table, const Partition& partition,
                              const std::string& conf_attribute, double t, GroundDistance d) {
  if (!(t >= 0 && t <= 1)) throw Error(ErrorCode::kInvalidT, "t must lie in [0, 1]");
  const std::size_t column = table.AttributeIndex(conf_attribute);
  ClassMeasure out;
  out.values = ClassEmds(table, ClassValues(table, partition, column), column, d);
  for (double v : out.values) out.worst = std::max(out.worst, v);
  out.satisfied = out.worst <= t;
  return out;
}

double ClosenessToDpEpsilon(double multiplicative_t) {
  if (!(multiplicative_t >= 1)) {
    throw Error(ErrorCode::kInvalidT, "multiplicative closeness must be at least 1");
  }
  return std::log(multiplicative_t);
}

Partition EnforceModels(const MicrodataTable& table, std::span<const std::string> qi_attributes,
                        const std::string& conf_attribute, const ModelTargets& targets) {
  if (!targets.l && !targets.t) {
    throw Error(ErrorCode::kInvalidArgument, "enforcement needs an l or a t target");
  }
  if (targets.t && !(*targets.t >= 0 && *targets.t <= 1)) {
    throw Error(ErrorCode::kInvalidT, "t must lie in [0, 1]");
  }
  const std::size_t column = table.AttributeIndex(conf_attribute);
  Partition p = MdavPartition(table, qi_attributes, targets.k);

  const std::vector<std::size_t> cols = table.AttributeIndices(qi_attributes);
  const QiMatrix m = BuildQiMatrix(table, cols);
  std::map<RowId, Eigen::Index> position;
  for (std::size_t i = 0; i < table.num_rows(); ++i) {
    position[table.row_id(i)] = static_cast<Eigen::Index>(i);
  }
  auto centroid = [&](const std::vector<RowId>& group) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m.numeric.cols());
    for (RowId id : group) c += m.numeric.row(position[id]).transpose();
    c /= static_cast<double>(group.size());
    Eigen::VectorXi modes(m.categorical.cols());
    for (Eigen::Index a = 0; a < m.categorical.cols(); ++a) {
      std::map<int, int> counts;
      for (RowId id : group) ++counts[m.categorical(position[id], a)];
      int best = 0, best_count = -1;
      for (const auto& [code, count] : counts) {
        if (count > best_count) best = code, best_count = count;
      }
      modes[a] = best;
    }
    return std::pair{c, modes};
  };

  // Name of the first target the class misses, or empty.
  auto violation = [&](const std::vector<Cell>& values, double emd) -> std::string {
    if (values.size() < static_cast<std::size_t>(targets.k)) return "k";
    if (targets.l && LDiversity(values, targets.l_variant) < *targets.l) return "l";
    if (targets.t && emd > *targets.t) return "t";
    return {};
  };

  while (true) {
    const auto classes = ClassValues(table, p, column);
    const std::vector<double> emds = ClassEmds(table, classes, column, targets.ground);
    std::size_t bad = classes.size();
    std::string which;
    for (std::size_t g = 0; g < classes.size(); ++g) {
      which = violation(classes[g], emds[g]);
      if (!which.empty()) {
        bad = g;
        break;
      }
    }
    if (bad == classes.size()) return p;
    if (classes.size() == 1) {
      throw Error(ErrorCode::kInfeasible,
                  "the " + which + " target cannot be met even by a single class");
    }
    const auto [cb, mb] = centroid(p.groups[bad]);
    std::size_t nearest = bad;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < p.size(); ++g) {
      if (g == bad) continue;
      const auto [cg, mg] = centroid(p.groups[g]);
      const double d = (cg - cb).squaredNorm() + static_cast<double>((mg.array() != mb.array()).count());
      if (d < best) {
        best = d;
        nearest = g;
      }
    }
    const std::size_t keep = std::min(bad, nearest);
    const std::size_t drop = std::max(bad, nearest);
    auto& target = p.groups[keep];
    target.insert(target.end(), p.groups[drop].begin(), p.groups[drop].end());
    std::sort(target.begin(), target.end());
    p.groups.erase(p.groups.begin() + static_cast<std::ptrdiff_t>(drop));
  }
}

bool SimilarityAlert(std::span<const double> class_values, std::span<const double> global_values,
                     double threshold) {
  if (class_values.empty()) throw Error(ErrorCode::kEmptyClass, "class has no values");
  if (global_values.empty()) throw Error(ErrorCode::kInvalidArgument, "no global values");
  const auto [cmin, cmax] = std::minmax_element(class_values.begin(), class_values.end());
  const auto [gmin, gmax] = std::minmax_element(global_values.begin(), global_values.end());
  const double class_range = *cmax - *cmin;
  const double global_range = *gmax - *gmin;
  if (class_range == 0) return true;
  return class_range / global_range < threshold;
}

}  // namespace sdc
