#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "sdc/error.h"
#include "sdc/kanon.h"

namespace sdc {

QiMatrix BuildQiMatrix(const MicrodataTable& table, std::span<const std::size_t> qi_columns) {
  QiMatrix m;
  for (std::size_t j : qi_columns) {
    (table.attribute(j).kind == Kind::kNumeric ? m.numeric_columns : m.categorical_columns)
        .push_back(j);
  }
  const auto n = static_cast<Eigen::Index>(table.num_rows());
  const auto p = static_cast<Eigen::Index>(m.numeric_columns.size());
  m.numeric.resize(n, p);
  m.mean.resize(p);
  m.scale.resize(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    const Eigen::VectorXd col = table.NumericColumn(m.numeric_columns[static_cast<std::size_t>(c)]);
    const double mean = n > 0 ? col.mean() : 0.0;
    const double var = n > 0 ? (col.array() - mean).square().mean() : 0.0;
    m.mean[c] = mean;
    m.scale[c] = var > 0 ? std::sqrt(var) : 1.0;
    m.numeric.col(c) = (col.array() - mean) / m.scale[c];
  }
  m.categorical.resize(n, static_cast<Eigen::Index>(m.categorical_columns.size()));
  for (std::size_t c = 0; c < m.categorical_columns.size(); ++c) {
    std::set<std::string> values;
    for (std::size_t i = 0; i < table.num_rows(); ++i) {
      values.insert(CellText(table.cell(i, m.categorical_columns[c])));
    }
    std::vector<std::string> codes(values.begin(), values.end());
    for (std::size_t i = 0; i < table.num_rows(); ++i) {
      const std::string text = CellText(table.cell(i, m.categorical_columns[c]));
      m.categorical(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          static_cast<int>(std::lower_bound(codes.begin(), codes.end(), text) - codes.begin());
    }
    m.categories.push_back(std::move(codes));
  }
  return m;
}

namespace {

// A point in QI space: standardized numeric coordinates plus categorical
// codes.
struct QiPoint {
  Eigen::VectorXd numeric;
  Eigen::VectorXi categorical;
};

class MdavState {
 public:
  MdavState(const QiMatrix& m, std::vector<RowId> ids) : m_(m), ids_(std::move(ids)) {}

  double Distance2(Eigen::Index i, const QiPoint& p) const {
    double d = (m_.numeric.row(i).transpose() - p.numeric).squaredNorm();
    d += (m_.categorical.row(i).transpose().array() != p.categorical.array()).count();
    return d;
  }

  QiPoint Row(Eigen::Index i) const {
    return {m_.numeric.row(i).transpose(), m_.categorical.row(i).transpose()};
  }

  // Mean of numeric coordinates, mode (smallest code on ties) of categorical.
  QiPoint Centroid(const std::vector<Eigen::Index>& rows) const {
    QiPoint c;
    c.numeric = Eigen::VectorXd::Zero(m_.numeric.cols());
    for (Eigen::Index i : rows) c.numeric += m_.numeric.row(i).transpose();
    if (!rows.empty()) c.numeric /= static_cast<double>(rows.size());
    c.categorical.resize(m_.categorical.cols());
    for (Eigen::Index a = 0; a < m_.categorical.cols(); ++a) {
      std::map<int, int> counts;
      for (Eigen::Index i : rows) ++counts[m_.categorical(i, a)];
      int best = 0, best_count = -1;
      for (const auto& [code, count] : counts) {
        if (count > best_count) best = code, best_count = count;
      }
      c.categorical[a] = best;
    }
    return c;
  }

  // Farthest remaining row from p; ties to the lowest row id.
  Eigen::Index Farthest(const std::vector<Eigen::Index>& rows, const QiPoint& p) const {
    Eigen::Index best = rows.front();
    double best_d = -1.0;
    for (Eigen::Index i : rows) {
      const double d = Distance2(i, p);
      if (d > best_d || (d == best_d && ids_[static_cast<std::size_t>(i)] <
                                            ids_[static_cast<std::size_t>(best)])) {
        best = i;
        best_d = d;
      }
    }
    return best;
  }

  // Removes `center` and its k - 1 nearest remaining rows (ties to the
  // lowest row id) from `rows` and returns them.
  std::vector<Eigen::Index> TakeGroup(std::vector<Eigen::Index>& rows, Eigen::Index center,
                                      int k) const {
    const QiPoint p = Row(center);
    std::vector<std::pair<double, Eigen::Index>> order;
    for (Eigen::Index i : rows) {
      if (i != center) order.emplace_back(Distance2(i, p), i);
    }
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return ids_[static_cast<std::size_t>(a.second)] < ids_[static_cast<std::size_t>(b.second)];
    });
    std::vector<Eigen::Index> group = {center};
    for (int t = 0; t < k - 1; ++t) group.push_back(order[static_cast<std::size_t>(t)].second);
    std::set<Eigen::Index> taken(group.begin(), group.end());
    std::erase_if(rows, [&](Eigen::Index i) { return taken.contains(i); });
    return group;
  }

 private:
  const QiMatrix& m_;
  std::vector<RowId> ids_;
};

}  // namespace

Partition MdavPartition(const MicrodataTable& table, std::span<const std::string> qi_attributes,
                        int k) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "MDAV needs k >= 2");
  if (qi_attributes.empty()) throw Error(ErrorCode::kInvalidArgument, "no quasi-identifiers");
  const std::size_t n = table.num_rows();
  if (n < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kTooFewRows,
                std::to_string(n) + " rows cannot form a group of " + std::to_string(k));
  }
  const std::vector<std::size_t> cols = table.AttributeIndices(qi_attributes);
  const QiMatrix m = BuildQiMatrix(table, cols);
  const MdavState state(m, table.row_ids());

  std::vector<Eigen::Index> rows(n);
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  std::vector<std::vector<Eigen::Index>> groups;
  const std::size_t ku = static_cast<std::size_t>(k);

  while (rows.size() >= 3 * ku) {
    const Eigen::Index r = state.Farthest(rows, state.Centroid(rows));
    const Eigen::Index s = state.Farthest(rows, state.Row(r));
    groups.push_back(state.TakeGroup(rows, r, k));
    groups.push_back(state.TakeGroup(rows, s, k));
  }
  if (rows.size() >= 2 * ku) {
    const Eigen::Index r = state.Farthest(rows, state.Centroid(rows));
    groups.push_back(state.TakeGroup(rows, r, k));
  }
  if (!rows.empty()) groups.push_back(rows);

  Partition p;
  for (const auto& g : groups) {
    std::vector<RowId> ids;
    for (Eigen::Index i : g) ids.push_back(table.row_id(static_cast<std::size_t>(i)));
    p.groups.push_back(std::move(ids));
  }
  return p;
}

MicroaggregationResult MdavMicroaggregate(const MicrodataTable& table,
                                          std::span<const std::string> qi_attributes, int k) {
  return Microaggregate(table, qi_attributes, MdavPartition(table, qi_attributes, k), k);
}

MicroaggregationResult Microaggregate(const MicrodataTable& table,
                                      std::span<const std::string> qi_attributes,
                                      const Partition& partition, int k) {
  MicroaggregationResult out;
  out.partition = partition;
  const std::vector<std::size_t> cols = table.AttributeIndices(qi_attributes);

  std::map<RowId, std::size_t> position;
  for (std::size_t i = 0; i < table.num_rows(); ++i) position[table.row_id(i)] = i;

  std::vector<std::vector<Cell>> rows = table.rows();
  for (const auto& group : out.partition.groups) {
    for (std::size_t j : cols) {
      const AttributeSchema& a = table.attribute(j);
      Cell replacement;
      if (a.kind == Kind::kNumeric) {
        double sum = 0.0;
        for (RowId id : group) sum += table.number(position[id], j);
        replacement = std::clamp(sum / static_cast<double>(group.size()), a.min, a.max);
      } else {
        std::map<std::string, int> counts;
        for (RowId id : group) ++counts[table.text(position[id], j)];
        std::string best;
        int best_count = -1;
        for (const auto& [value, count] : counts) {
          if (count > best_count) best = value, best_count = count;
        }
        replacement = best;
      }
      for (RowId id : group) rows[position[id]][j] = replacement;
    }
  }
  out.release.table = SuppressIdentifiers(table.WithRows(std::move(rows)));
  out.release.partition = out.partition;
  out.release.provenance.mechanism = "mdav";
  out.release.provenance.params.k = k;
  out.release.provenance.details["qi_attributes"] = std::vector<std::string>(
      qi_attributes.begin(), qi_attributes.end());
  out.release.provenance.details["non_confidential_passthrough"] = true;
  return out;
}

}  // namespace sdc
