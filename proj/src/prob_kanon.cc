#include "sdc/prob_kanon.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sdc/error.h"
#include "sdc/kanon.h"
#include "sdc/rng.h"

namespace sdc {

namespace {

std::map<RowId, std::size_t> Positions(const MicrodataTable& table) {
  std::map<RowId, std::size_t> position;
  for (std::size_t i = 0; i < table.num_rows(); ++i) position[table.row_id(i)] = i;
  return position;
}

}  // namespace

AnonymizedRelease ClusterAndPermute(const MicrodataTable& table,
                                    std::span<const std::string> qi_attributes, int k,
                                    std::uint64_t seed, PermutationMode mode) {
  return ClusterAndPermute(table, qi_attributes, MdavPartition(table, qi_attributes, k), k, seed,
                           mode);
}

AnonymizedRelease ClusterAndPermute(const MicrodataTable& table,
                                    std::span<const std::string> qi_attributes,
                                    const Partition& partition, int k, std::uint64_t seed,
                                    PermutationMode mode) {
  const std::vector<std::size_t> cols = table.AttributeIndices(qi_attributes);
  const std::map<RowId, std::size_t> position = Positions(table);
  const Rng root(seed);

  std::vector<std::vector<Cell>> rows = table.rows();
  for (std::size_t g = 0; g < partition.size(); ++g) {
    std::vector<std::size_t> members;
    for (RowId id : partition.groups[g]) members.push_back(position.at(id));
    Rng group_rng = root.Fork(g);
    auto permute = [&](Rng& rng, std::span<const std::size_t> columns) {
      std::vector<std::size_t> perm(members.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      rng.Shuffle(std::span<std::size_t>(perm));
      for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j : columns) {
          rows[members[i]][j] = table.cell(members[perm[i]], j);
        }
      }
    };
    if (mode == PermutationMode::kVector) {
      permute(group_rng, cols);
    } else {
      for (std::size_t a = 0; a < cols.size(); ++a) {
        Rng attr_rng = group_rng.Fork(a);
        const std::size_t column[] = {cols[a]};
        permute(attr_rng, column);
      }
    }
  }

  AnonymizedRelease out;
  out.table = SuppressIdentifiers(table.WithRows(std::move(rows)));
  out.partition = partition;
  out.provenance.mechanism = "cluster_and_permute";
  out.provenance.params.k = k;
  out.provenance.seed = seed;
  out.provenance.details["qi_attributes"] =
      std::vector<std::string>(qi_attributes.begin(), qi_attributes.end());
  out.provenance.details["permutation"] =
      mode == PermutationMode::kVector ? "vector" : "per_attribute";
  out.provenance.details["non_confidential_passthrough"] = true;
  return out;
}

AnatomyRelease Anatomize(const MicrodataTable& table, const Partition& partition, int k,
                         std::uint64_t seed) {
  if (table.FindAttribute("group_id")) {
    throw Error(ErrorCode::kInvalidArgument, "attribute name 'group_id' is reserved");
  }
  const std::map<RowId, std::size_t> position = Positions(table);
  std::size_t covered = 0;
  for (const auto& g : partition.groups) {
    if (g.size() < static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::kGroupTooSmall,
                  "group of " + std::to_string(g.size()) + " rows is below k = " +
                      std::to_string(k));
    }
    for (RowId id : g) {
      if (!position.contains(id)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "partition names unknown row id " + std::to_string(id));
      }
    }
    covered += g.size();
  }
  partition.GroupIndex();  // rejects overlapping groups
  if (covered != table.num_rows()) {
    throw Error(ErrorCode::kInvalidArgument, "partition does not cover every row");
  }

  std::vector<std::size_t> qi_cols;
  std::vector<std::size_t> conf_cols;
  for (std::size_t j = 0; j < table.num_attributes(); ++j) {
    switch (table.attribute(j).role) {
      case Role::kIdentifier:
        break;
      case Role::kConfidential:
        conf_cols.push_back(j);
        break;
      default:
        qi_cols.push_back(j);
    }
  }
  const double last_group = partition.size() > 0 ? static_cast<double>(partition.size() - 1) : 0.0;
  const AttributeSchema group_attr =
      AttributeSchema::Numeric("group_id", Role::kNonConfidential, 0.0, last_group);
  Schema qi_schema = {group_attr};
  Schema conf_schema = {group_attr};
  for (std::size_t j : qi_cols) qi_schema.push_back(table.attribute(j));
  for (std::size_t j : conf_cols) conf_schema.push_back(table.attribute(j));

  std::vector<std::vector<Cell>> qi_rows;
  std::vector<std::vector<Cell>> conf_rows;
  std::vector<RowId> qi_ids;
  std::vector<RowId> conf_ids;
  const Rng root(seed);
  for (std::size_t g = 0; g < partition.size(); ++g) {
    const double gid = static_cast<double>(g);
    std::vector<std::size_t> members;
    for (RowId id : partition.groups[g]) members.push_back(position.at(id));
    for (std::size_t i : members) {
      std::vector<Cell> row = {gid};
      for (std::size_t j : qi_cols) row.push_back(table.cell(i, j));
      qi_rows.push_back(std::move(row));
      qi_ids.push_back(table.row_id(i));
    }
    Rng rng = root.Fork(g);
    rng.Shuffle(std::span<std::size_t>(members));
    for (std::size_t i : members) {
      std::vector<Cell> row = {gid};
      for (std::size_t j : conf_cols) row.push_back(table.cell(i, j));
      conf_rows.push_back(std::move(row));
      conf_ids.push_back(table.row_id(i));
    }
  }

  AnatomyRelease out{
      MicrodataTable(std::move(qi_schema), std::move(qi_rows), std::move(qi_ids)),
      MicrodataTable(std::move(conf_schema), std::move(conf_rows), std::move(conf_ids)),
      partition,
      {}};
  out.provenance.mechanism = "anatomy";
  out.provenance.params.k = k;
  out.provenance.seed = seed;
  return out;
}

namespace {

ProbabilisticKReport Judge(AttackReport linkage, int k, int trials, double slack) {
  ProbabilisticKReport report;
  report.linkage = std::move(linkage);
  report.bound = 1.0 / k + slack;
  const auto& rates = report.linkage.per_record_success;
  if (!rates.empty()) {
    report.max_record_rate = *std::max_element(rates.begin(), rates.end());
  }
  const auto t = static_cast<std::uint64_t>(trials);
  const auto worst = static_cast<std::uint64_t>(std::llround(report.max_record_rate * trials));
  // Bonferroni over the external records: the worst of n rates is only
  // evidence of a leak when its simultaneous lower bound clears the bound.
  const double records = std::max<double>(1.0, static_cast<double>(rates.size()));
  report.max_record_interval = WilsonInterval(worst, t, 1.0 - 0.05 / records);
  report.pass = report.linkage.interval.upper <= report.bound &&
                report.max_record_interval.lower <= report.bound;
  return report;
}

void RequireK(int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
}

}  // namespace

ProbabilisticKReport VerifyProbabilisticK(const ReleaseFactory& mechanism,
                                          const MicrodataTable& external, int k, int trials,
                                          std::uint64_t seed, double slack,
                                          const LinkageStrategy& strategy) {
  RequireK(k);
  return Judge(LinkageAttack(mechanism, external, strategy, trials, seed), k, trials, slack);
}

ProbabilisticKReport VerifyProbabilisticK(const AnonymizedRelease& release,
                                          const MicrodataTable& external, int k, int trials,
                                          std::uint64_t seed, double slack,
                                          const LinkageStrategy& strategy) {
  RequireK(k);
  return Judge(LinkageAttack(release, external, strategy, trials, seed), k, trials, slack);
}

}  // namespace sdc
