#ifndef SDC_DP_H_
#define SDC_DP_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "nlohmann/json.hpp"
#include "sdc/release.h"
#include "sdc/rng.h"
#include "sdc/table.h"

namespace sdc {

enum class QueryKind { kCount, kSum, kMean, kMax, kIdentity };

struct Predicate {
  enum class Op { kEq, kNe, kLt, kLe, kGt, kGe };
  std::string attribute;
  Op op = Op::kEq;
  Cell value;

  bool Matches(const MicrodataTable& table, std::size_t row) const;
};

struct Query {
  QueryKind kind = QueryKind::kCount;
  std::string attribute;             // sum, mean, max, identity
  std::optional<Predicate> predicate;  // count; none counts every row
  std::size_t row = 0;               // identity
  // Public number of records, used by the mean's sensitivity.
  std::optional<std::size_t> public_n;
  // Public upper bound on the number of records, needed to bound the output
  // range of count and sum for the perfect-secrecy mechanism.
  std::optional<std::size_t> public_max_rows;

  static Query Count(std::optional<Predicate> predicate = std::nullopt);
  static Query Sum(std::string attribute);
  static Query Mean(std::string attribute, std::size_t public_n);
  static Query Max(std::string attribute);
  static Query Identity(std::size_t row, std::string attribute);

  nlohmann::json ToJson() const;
  static Query FromJson(const nlohmann::json& doc);
};

double EvaluateQuery(const Query& query, const MicrodataTable& table);

struct DpParams {
  double epsilon = 1.0;
  double delta = 0.0;
  NeighborModel neighbor_model = NeighborModel::kAddRemove;

  // Throws kNonPositiveEpsilon for epsilon < 0, kInvalidDelta outside [0, 1).
  void Validate() const;
};

// count: 1. sum over [lo, hi]: max(|lo|, |hi|) under add/remove, hi - lo
// under replace. identity and max: hi - lo. mean: (hi - lo) / n with the
// public n. Throws kUnboundedDomain for infinite bounds.
double GlobalSensitivity(const Query& query, const Schema& schema, NeighborModel model);

// Largest change over the neighbors of the actual table only (removal or
// replacement of one of its records). Never exceeds GlobalSensitivity.
double IndividualSensitivity(const Query& query, const MicrodataTable& table,
                             NeighborModel model);

// answer + Laplace(sensitivity / epsilon).
double LaplaceMechanism(double true_answer, double sensitivity, double epsilon, Rng& rng);

// Output range [lo, hi] of a query implied by the schema alone.
std::pair<double, double> QueryOutputRange(const Query& query, const Schema& schema);

// Uniform draw over the query's output range (integers for count); never
// reads the data.
double PerfectSecrecyMechanism(const Query& query, const Schema& schema, Rng& rng);

// Every non-identifier cell gets Laplace noise of scale width / epsilon_cell
// with epsilon_cell = epsilon / (#released attributes), then is clamped to
// the attribute's domain.
AnonymizedRelease DpMicrodataRelease(const MicrodataTable& table, double epsilon,
                                     std::uint64_t seed);

// 1-D: x + Laplace(1 / epsilon). 2-D: planar Laplace, uniform angle and a
// Gamma(2, 1 / epsilon) radius.
double MetricDpMechanism(double x, double epsilon, Rng& rng);
Eigen::Vector2d MetricDpMechanism(const Eigen::Vector2d& x, double epsilon, Rng& rng);

// Rényi DP of order alpha to (epsilon, delta)-DP: eps + ln(1/delta)/(alpha-1).
double RdpToDp(double alpha, double eps_rdp, double delta);
// zCDP to (epsilon, delta)-DP: rho + 2 sqrt(rho ln(1/delta)).
double ZcdpToDp(double rho, double delta);

struct EmpiricalDpResult {
  double max_log_ratio = 0.0;
  // Slack of the bin attaining the maximum: z * sqrt(1/c1 + 1/c2).
  double slack = 0.0;
  double critical_z = 0.0;
  int bins_considered = 0;
  bool pass = false;

  nlohmann::json ToJson() const;
};

// Bin-wise log ratio test on two output samples. A bin fails when its
// |log(p1/p2)| exceeds epsilon + z * se, with z the one-sided normal quantile
// at alpha / (#bins considered); the check passes when no bin fails.
EmpiricalDpResult CheckLogRatio(std::span<const double> a, std::span<const double> b,
                                double epsilon, int bins = 64, int min_joint_count = 25,
                                double alpha = 0.01);

// A randomized mechanism with a one-dimensional output.
using ScalarMechanism = std::function<double(const MicrodataTable&, Rng&)>;

// Runs the mechanism `trials` times on each table and applies CheckLogRatio.
EmpiricalDpResult EmpiricalDpCheck(const ScalarMechanism& mechanism, const MicrodataTable& table1,
                                   const MicrodataTable& table2, double epsilon, int bins,
                                   int trials, std::uint64_t seed,
                                   NeighborModel model = NeighborModel::kAddRemove);

}  // namespace sdc

#endif  // SDC_DP_H_
