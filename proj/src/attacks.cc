#include "sdc/attacks.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sdc/error.h"
#include "sdc/kanon.h"

namespace sdc {

namespace {

struct LinkPlan {
  std::vector<std::string> names;
  std::vector<std::size_t> release_cols;
  std::vector<std::size_t> external_cols;
  std::vector<double> scale;  // population std of numeric external columns
  std::vector<const GeneralizationHierarchy*> hierarchy;
};

LinkPlan PlanLinkage(const MicrodataTable& release, const MicrodataTable& external,
                     const LinkageStrategy& strategy) {
  LinkPlan plan;
  if (!strategy.qi_attributes.empty()) {
    plan.names = strategy.qi_attributes;
  } else {
    for (std::size_t j : release.AttributesWithRole(Role::kQuasiIdentifier)) {
      const std::string& name = release.attribute(j).name;
      if (external.FindAttribute(name)) plan.names.push_back(name);
    }
  }
  if (plan.names.empty()) {
    throw Error(ErrorCode::kNoSharedQIs, "release and external table share no quasi-identifier");
  }
  for (const std::string& name : plan.names) {
    const auto rj = release.FindAttribute(name);
    const auto ej = external.FindAttribute(name);
    if (!rj || !ej) {
      throw Error(ErrorCode::kNoSharedQIs, "'" + name + "' is missing from one side");
    }
    plan.release_cols.push_back(*rj);
    plan.external_cols.push_back(*ej);
    double scale = 1.0;
    if (external.attribute(*ej).kind == Kind::kNumeric && external.num_rows() > 0) {
      const Eigen::VectorXd col = external.NumericColumn(*ej);
      const double var = (col.array() - col.mean()).square().mean();
      if (var > 0) scale = std::sqrt(var);
    }
    plan.scale.push_back(scale);
    const GeneralizationHierarchy* h = nullptr;
    if (strategy.hierarchies != nullptr) {
      auto it = strategy.hierarchies->find(name);
      if (it != strategy.hierarchies->end()) h = &it->second;
    }
    plan.hierarchy.push_back(h);
  }
  return plan;
}

bool LabelCovers(const std::string& label, const Cell& value, const GeneralizationHierarchy* h) {
  if (CellText(value) == label) return true;
  if (h != nullptr) return h->Covers(label, value);
  const double* x = std::get_if<double>(&value);
  if (x == nullptr || label.size() < 5 || label.front() != '[' || label.back() != ']') {
    return false;
  }
  const std::size_t comma = label.find(',');
  if (comma == std::string::npos) return false;
  const double lo = MaskedNumericValue(label.substr(1, comma - 1), std::nan(""));
  const double hi = MaskedNumericValue(label.substr(comma + 1, label.size() - comma - 2),
                                       std::nan(""));
  return *x >= lo && *x <= hi;
}

double CellDistance(const Cell& released, const Cell& external, double scale,
                    const GeneralizationHierarchy* h) {
  const double* r = std::get_if<double>(&released);
  const double* e = std::get_if<double>(&external);
  if (r != nullptr && e != nullptr) {
    const double z = (*r - *e) / scale;
    return z * z;
  }
  if (r != nullptr) return CellText(released) == CellText(external) ? 0.0 : 1.0;
  return LabelCovers(std::get<std::string>(released), external, h) ? 0.0 : 1.0;
}

// For each external record, the release rows at minimum distance.
std::vector<std::vector<std::size_t>> Minimizers(const MicrodataTable& release,
                                                 const MicrodataTable& external,
                                                 const LinkPlan& plan) {
  std::vector<std::vector<std::size_t>> out(external.num_rows());
  for (std::size_t e = 0; e < external.num_rows(); ++e) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < release.num_rows(); ++r) {
      double d = 0.0;
      for (std::size_t a = 0; a < plan.names.size(); ++a) {
        d += CellDistance(release.cell(r, plan.release_cols[a]),
                          external.cell(e, plan.external_cols[a]), plan.scale[a],
                          plan.hierarchy[a]);
      }
      if (d < best) {
        best = d;
        out[e].clear();
      }
      if (d == best) out[e].push_back(r);
    }
  }
  return out;
}

void LinkOnce(const MicrodataTable& release, const MicrodataTable& external,
              const std::vector<std::vector<std::size_t>>& minimizers, Rng& rng,
              std::vector<std::uint64_t>& hits) {
  for (std::size_t e = 0; e < external.num_rows(); ++e) {
    const auto& cands = minimizers[e];
    if (cands.empty()) continue;
    const std::size_t r = cands[rng.UniformIndex(cands.size())];
    if (release.row_id(r) == external.row_id(e)) ++hits[e];
  }
}

AttackReport Summarize(const std::vector<std::uint64_t>& hits, int trials, std::uint64_t seed) {
  AttackReport report;
  report.attack = "linkage";
  report.trials = trials;
  report.seed = seed;
  for (std::uint64_t h : hits) {
    report.per_record_success.push_back(static_cast<double>(h) / trials);
    report.successes += h;
  }
  report.attempts = static_cast<std::uint64_t>(trials) * hits.size();
  report.rate = report.attempts > 0
                    ? static_cast<double>(report.successes) / static_cast<double>(report.attempts)
                    : 0.0;
  report.interval = WilsonInterval(report.successes, report.attempts);
  return report;
}

void RequireTrials(int trials) {
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be positive");
}

}  // namespace

nlohmann::json AttackReport::ToJson() const {
  return {{"attack", attack},
          {"success_rate", rate},
          {"successes", successes},
          {"attempts", attempts},
          {"ci95", {interval.lower, interval.upper}},
          {"max_record_success",
           per_record_success.empty()
               ? 0.0
               : *std::max_element(per_record_success.begin(), per_record_success.end())},
          {"trials", trials},
          {"seed", seed}};
}

AttackReport LinkageAttack(const AnonymizedRelease& release, const MicrodataTable& external,
                           const LinkageStrategy& strategy, int trials, std::uint64_t seed) {
  RequireTrials(trials);
  const LinkPlan plan = PlanLinkage(release.table, external, strategy);
  const auto minimizers = Minimizers(release.table, external, plan);
  std::vector<std::uint64_t> hits(external.num_rows(), 0);
  const Rng root(seed);
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.Fork(2 * static_cast<std::uint64_t>(t) + 1);
    LinkOnce(release.table, external, minimizers, rng, hits);
  }
  return Summarize(hits, trials, seed);
}

AttackReport LinkageAttack(const ReleaseFactory& mechanism, const MicrodataTable& external,
                           const LinkageStrategy& strategy, int trials, std::uint64_t seed) {
  RequireTrials(trials);
  std::vector<std::uint64_t> hits(external.num_rows(), 0);
  const Rng root(seed);
  for (int t = 0; t < trials; ++t) {
    const auto index = 2 * static_cast<std::uint64_t>(t);
    const AnonymizedRelease release = mechanism(DeriveSeed(seed, index));
    const LinkPlan plan = PlanLinkage(release.table, external, strategy);
    const auto minimizers = Minimizers(release.table, external, plan);
    Rng rng = root.Fork(index + 1);
    LinkOnce(release.table, external, minimizers, rng, hits);
  }
  return Summarize(hits, trials, seed);
}

std::map<std::string, double> ColumnDistribution(const MicrodataTable& table,
                                                 const std::string& attribute) {
  const std::size_t j = table.AttributeIndex(attribute);
  std::map<std::string, double> dist;
  for (std::size_t i = 0; i < table.num_rows(); ++i) dist[CellText(table.cell(i, j))] += 1.0;
  for (auto& [value, mass] : dist) mass /= static_cast<double>(table.num_rows());
  return dist;
}

nlohmann::json AttributeInferenceReport::ToJson() const {
  nlohmann::json classes_json = nlohmann::json::array();
  for (const ClassInference& c : classes) {
    classes_json.push_back({{"class", c.class_index},
                            {"size", c.size},
                            {"posterior", c.posterior},
                            {"max_gain", c.max_gain},
                            {"max_gain_value", c.max_gain_value},
                            {"flagged", c.flagged}});
  }
  return {{"attack", "attribute_inference"},
          {"attribute", attribute},
          {"prior", prior},
          {"max_gain", max_gain},
          {"flagged_classes", flagged_classes},
          {"classes", std::move(classes_json)}};
}

AttributeInferenceReport AttributeInference(const MicrodataTable& release,
                                            const Partition& partition,
                                            const std::string& conf_attribute,
                                            const std::map<std::string, double>& global_distribution,
                                            double gain_threshold) {
  const std::size_t j = release.AttributeIndex(conf_attribute);
  std::map<RowId, std::size_t> position;
  for (std::size_t i = 0; i < release.num_rows(); ++i) position[release.row_id(i)] = i;

  AttributeInferenceReport report;
  report.attribute = conf_attribute;
  report.prior = global_distribution;
  report.max_gain = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < partition.size(); ++g) {
    const auto& members = partition.groups[g];
    if (members.empty()) throw Error(ErrorCode::kEmptyClass, "class " + std::to_string(g));
    ClassInference c;
    c.class_index = g;
    c.size = members.size();
    for (RowId id : members) {
      auto it = position.find(id);
      if (it == position.end()) {
        throw Error(ErrorCode::kMisaligned, "partition row id " + std::to_string(id) +
                                                " is not in the release");
      }
      c.posterior[CellText(release.cell(it->second, j))] += 1.0;
    }
    for (auto& [value, mass] : c.posterior) mass /= static_cast<double>(c.size);
    c.max_gain = -std::numeric_limits<double>::infinity();
    std::set<std::string> support;
    for (const auto& [value, mass] : c.posterior) support.insert(value);
    for (const auto& [value, mass] : global_distribution) support.insert(value);
    for (const std::string& value : support) {
      auto post = c.posterior.find(value);
      auto prior = global_distribution.find(value);
      const double gain = (post == c.posterior.end() ? 0.0 : post->second) -
                          (prior == global_distribution.end() ? 0.0 : prior->second);
      c.gain[value] = gain;
      if (gain > c.max_gain) {
        c.max_gain = gain;
        c.max_gain_value = value;
      }
    }
    c.flagged = c.max_gain > gain_threshold;
    if (c.flagged) ++report.flagged_classes;
    report.max_gain = std::max(report.max_gain, c.max_gain);
    report.classes.push_back(std::move(c));
  }
  if (report.classes.empty()) report.max_gain = 0.0;
  return report;
}

nlohmann::json MembershipReport::ToJson() const {
  return {{"attack", "membership_inference"},
          {"advantage", advantage},
          {"raw_advantage", raw_advantage},
          {"accuracy", accuracy},
          {"accuracy_ci95", {accuracy_interval.lower, accuracy_interval.upper}},
          {"trials", trials},
          {"calibration_runs", calibration_runs},
          {"seed", seed}};
}

MembershipReport MembershipInference(const ScalarMechanism& mechanism,
                                     const MicrodataTable& table_with_target,
                                     const MicrodataTable& table_without_target, int trials,
                                     std::uint64_t seed, int calibration_runs, int bins) {
  RequireTrials(trials);
  if (calibration_runs < 1 || bins < 1) {
    throw Error(ErrorCode::kInvalidArgument, "calibration runs and bins must be positive");
  }
  if (!AreNeighbors(table_with_target, table_without_target, NeighborModel::kAddRemove)) {
    throw Error(ErrorCode::kNotNeighbors, "tables must differ by exactly the target record");
  }
  const Rng root(seed);
  std::vector<double> with(static_cast<std::size_t>(calibration_runs));
  std::vector<double> without(static_cast<std::size_t>(calibration_runs));
  Rng with_rng = root.Fork(0);
  Rng without_rng = root.Fork(1);
  for (double& y : with) y = mechanism(table_with_target, with_rng);
  for (double& y : without) y = mechanism(table_without_target, without_rng);

  // Bins span the central 99% of the pooled outputs; the outer tails fall
  // into the end bins, so a few extreme draws cannot coarsen the grid.
  std::vector<double> pooled = with;
  pooled.insert(pooled.end(), without.begin(), without.end());
  std::sort(pooled.begin(), pooled.end());
  const auto at = [&](double q) {
    return pooled[static_cast<std::size_t>(q * static_cast<double>(pooled.size() - 1))];
  };
  const double lo = at(0.005);
  const double hi = at(0.995);
  const Eigen::VectorXd dens_with = Histogram(with, lo, hi, bins);
  const Eigen::VectorXd dens_without = Histogram(without, lo, hi, bins);

  Rng rng = root.Fork(2);
  std::uint64_t correct = 0;
  for (int t = 0; t < trials; ++t) {
    const bool member = rng.Bernoulli(0.5);
    const double y = mechanism(member ? table_with_target : table_without_target, rng);
    const int b = HistogramBin(y, lo, hi, bins);
    bool guess;
    if (dens_with[b] != dens_without[b]) {
      guess = dens_with[b] > dens_without[b];
    } else {
      guess = rng.Bernoulli(0.5);
    }
    if (guess == member) ++correct;
  }
  MembershipReport report;
  report.trials = trials;
  report.calibration_runs = calibration_runs;
  report.seed = seed;
  report.accuracy = static_cast<double>(correct) / trials;
  report.accuracy_interval = WilsonInterval(correct, static_cast<std::uint64_t>(trials));
  report.raw_advantage = 2.0 * (report.accuracy - 0.5);
  report.advantage = std::max(0.0, report.raw_advantage);
  return report;
}

nlohmann::json IntersectionReport::ToJson() const {
  nlohmann::json dist = nlohmann::json::object();
  for (const auto& [size, count] : distribution) dist[std::to_string(size)] = count;
  return {{"attack", "intersection"},
          {"min_effective_anonymity", min_effective_anonymity},
          {"vacuous", vacuous},
          {"distribution", std::move(dist)}};
}

IntersectionReport IntersectionAttack(const AnonymizedRelease& release1,
                                      const AnonymizedRelease& release2,
                                      const std::vector<std::pair<RowId, RowId>>& shared) {
  if (!release1.partition || !release2.partition) {
    throw Error(ErrorCode::kMissingPartition, "both releases must carry their partition");
  }
  const auto index1 = release1.partition->GroupIndex();
  const auto index2 = release2.partition->GroupIndex();
  // Shared individuals located in both releases, as (class1, class2).
  std::vector<std::pair<std::size_t, std::size_t>> located;
  std::vector<RowId> ids;
  for (const auto& [id1, id2] : shared) {
    auto a = index1.find(id1);
    auto b = index2.find(id2);
    if (a == index1.end() || b == index2.end()) continue;
    located.emplace_back(a->second, b->second);
    ids.push_back(id1);
  }
  IntersectionReport report;
  report.vacuous = located.empty();
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cell_count;
  for (const auto& cls : located) ++cell_count[cls];
  report.min_effective_anonymity = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < located.size(); ++i) {
    const std::size_t size = cell_count[located[i]];
    report.effective_anonymity[ids[i]] = size;
    ++report.distribution[size];
    report.min_effective_anonymity = std::min(report.min_effective_anonymity, size);
  }
  if (report.vacuous) report.min_effective_anonymity = 0;
  return report;
}

}  // namespace sdc
