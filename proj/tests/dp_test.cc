#include <cmath>
#include <cstdlib>
#include <filesystem>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "oracles/neighbors.h"
#include "sdc/dp.h"
#include "sdc/error.h"
#include "sdc/stats.h"
#include "support.h"

namespace sdc {
namespace {

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

const Schema kUnit = {AttributeSchema::Numeric("x", Role::kConfidential, 0, 1)};
const Schema kHundred = {AttributeSchema::Numeric("x", Role::kConfidential, 0, 100)};

TEST(GlobalSensitivityTest, SpecValues) {
  EXPECT_EQ(GlobalSensitivity(Query::Count(), kHundred, NeighborModel::kAddRemove), 1.0);
  EXPECT_EQ(GlobalSensitivity(Query::Identity(0, "x"), kHundred, NeighborModel::kReplace), 100.0);
  EXPECT_EQ(GlobalSensitivity(Query::Sum("x"), kUnit, NeighborModel::kAddRemove), 1.0);
  EXPECT_EQ(GlobalSensitivity(Query::Mean("x", 10), kHundred, NeighborModel::kReplace), 10.0);
}

TEST(GlobalSensitivityTest, UnboundedDomain) {
  const Schema open = {AttributeSchema::Numeric("x", Role::kConfidential, 0,
                                                std::numeric_limits<double>::infinity())};
  EXPECT_EQ(CodeOf([&] { GlobalSensitivity(Query::Sum("x"), open, NeighborModel::kAddRemove); }),
            ErrorCode::kUnboundedDomain);
}

TEST(GlobalSensitivityTest, MatchesBruteForceOnSmallGrid) {
  const Schema schema = {AttributeSchema::Numeric("x", Role::kConfidential, -2, 3)};
  const std::vector<double> grid = {-2, -1, 0, 1, 2, 3};
  auto sum = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  };
  auto max = [](const std::vector<double>& v) {
    return v.empty() ? -2.0 : *std::max_element(v.begin(), v.end());
  };
  for (bool replace : {false, true}) {
    const NeighborModel model = replace ? NeighborModel::kReplace : NeighborModel::kAddRemove;
    EXPECT_DOUBLE_EQ(GlobalSensitivity(Query::Sum("x"), schema, model),
                     oracle::GlobalSensitivityBruteForce(sum, grid, 3, replace));
    EXPECT_DOUBLE_EQ(GlobalSensitivity(Query::Max("x"), schema, model),
                     oracle::GlobalSensitivityBruteForce(max, grid, 3, replace));
  }
}

MicrodataTable Values(const std::vector<double>& v, double lo = 0, double hi = 100) {
  return testing::Column(v, lo, hi, Role::kConfidential);
}

TEST(IndividualSensitivityTest, SumOfSmallValues) {
  const MicrodataTable t = Values({1, 10, 4, 7});
  EXPECT_EQ(IndividualSensitivity(Query::Sum("x"), t, NeighborModel::kAddRemove), 10.0);
  EXPECT_EQ(GlobalSensitivity(Query::Sum("x"), t.schema(), NeighborModel::kAddRemove), 100.0);
}

TEST(IndividualSensitivityTest, ExtremeTableEqualsGlobal) {
  const MicrodataTable t = Values({0, 100, 3});
  for (NeighborModel m : {NeighborModel::kAddRemove, NeighborModel::kReplace}) {
    EXPECT_EQ(IndividualSensitivity(Query::Sum("x"), t, m),
              GlobalSensitivity(Query::Sum("x"), t.schema(), m));
  }
}

TEST(IndividualSensitivityTest, CountIsOne) {
  Rng rng(1);
  for (int rep = 0; rep < 5; ++rep) {
    const MicrodataTable t = testing::RandomNumericTable(rng, 10, 1);
    EXPECT_EQ(IndividualSensitivity(Query::Count(), t, NeighborModel::kAddRemove), 1.0);
  }
}

TEST(IndividualSensitivityTest, MatchesBruteForceAndNeverExceedsGlobal) {
  Rng rng(8);
  std::vector<double> grid;
  for (int g = 0; g <= 20; ++g) grid.push_back(g);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v;
    const std::size_t n = 2 + rng.UniformIndex(5);
    for (std::size_t i = 0; i < n; ++i) v.push_back(static_cast<double>(rng.UniformIndex(21)));
    const MicrodataTable t = Values(v, 0, 20);
    const std::vector<std::pair<Query, oracle::Query1d>> queries = {
        {Query::Sum("x"),
         [](const std::vector<double>& x) {
           double s = 0;
           for (double y : x) s += y;
           return s;
         }},
        {Query::Max("x"),
         [](const std::vector<double>& x) {
           return x.empty() ? 0.0 : *std::max_element(x.begin(), x.end());
         }},
        {Query::Mean("x", 8),
         [](const std::vector<double>& x) {
           double s = 0;
           for (double y : x) s += y;
           return s / 8.0;
         }},
        {Query::Identity(0, "x"), [](const std::vector<double>& x) { return x[0]; }},
    };
    for (bool replace : {false, true}) {
      const NeighborModel model = replace ? NeighborModel::kReplace : NeighborModel::kAddRemove;
      for (std::size_t q = 0; q < queries.size(); ++q) {
        if (q == 3 && !replace) continue;  // removing the row itself leaves nothing to read
        const double actual = IndividualSensitivity(queries[q].first, t, model);
        EXPECT_NEAR(actual,
                    oracle::IndividualSensitivityBruteForce(queries[q].second, v, grid, replace),
                    1e-12)
            << "query " << q << " replace " << replace << " rep " << rep;
        EXPECT_LE(actual, GlobalSensitivity(queries[q].first, t.schema(), model) + 1e-12);
      }
    }
  }
}

TEST(LaplaceTest, ScaleIsSensitivityOverEpsilon) {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(LaplaceMechanism(5.0, 1.0, 0.5, a), 5.0 + b.Laplace(2.0));
  // Variance of Laplace(b) is 2 b^2 = 8.
  Rng rng(1);
  std::vector<double> x(200000);
  for (double& v : x) v = LaplaceMechanism(0.0, 1.0, 0.5, rng);
  EXPECT_NEAR(Variance(x), 8.0, 0.15);
  EXPECT_NEAR(Mean(x), 0.0, 0.03);
}

TEST(LaplaceTest, ZeroSensitivityIsExact) {
  Rng rng(3);
  EXPECT_EQ(LaplaceMechanism(12.5, 0.0, 1.0, rng), 12.5);
}

TEST(LaplaceTest, RejectsNonPositiveEpsilon) {
  Rng rng(3);
  EXPECT_EQ(CodeOf([&] { LaplaceMechanism(0, 1, 0, rng); }), ErrorCode::kNonPositiveEpsilon);
  EXPECT_EQ(CodeOf([&] { LaplaceMechanism(0, 1, -1, rng); }), ErrorCode::kNonPositiveEpsilon);
}

TEST(LaplaceTest, GoldenValue) {
  Rng rng(20240611);
  const std::string actual = FormatNumber(LaplaceMechanism(0.0, 1.0, 1.0, rng)) + "\n";
  const std::string path = std::string(SDC_GOLDEN_DIR) + "/laplace_seed20240611.txt";
  if (std::getenv("SDC_UPDATE_GOLDEN") != nullptr) WriteFile(path, actual);
  ASSERT_TRUE(std::filesystem::exists(path)) << "missing golden file " << path;
  EXPECT_EQ(actual, ReadFile(path));
}

TEST(PerfectSecrecyTest, TwoArbitraryTablesIndistinguishable) {
  Query q = Query::Count();
  q.public_max_rows = 1000;
  const MicrodataTable a = Values({1, 2, 3});
  const MicrodataTable b = Values({99, 98, 97, 96, 95, 94, 93});
  Rng ra(1), rb(2);
  std::vector<double> xa(10000), xb(10000);
  for (double& v : xa) v = PerfectSecrecyMechanism(q, a.schema(), ra);
  for (double& v : xb) v = PerfectSecrecyMechanism(q, b.schema(), rb);
  EXPECT_GT(ChiSquareHomogeneityPValue(xa, xb, 20), 0.01);
  for (double v : xa) {
    EXPECT_GE(v, 0);
    EXPECT_LE(v, 1000);
    EXPECT_EQ(v, std::floor(v));
  }
}

TEST(PerfectSecrecyTest, OutputIgnoresCells) {
  Query q = Query::Sum("x");
  q.public_max_rows = 10;
  const MicrodataTable a = Values({1, 2, 3});
  const MicrodataTable flipped = Values({1, 2, 80});
  Rng ra(5), rb(5);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(PerfectSecrecyMechanism(q, a.schema(), ra),
              PerfectSecrecyMechanism(q, flipped.schema(), rb));
  }
  const auto [lo, hi] = QueryOutputRange(q, a.schema());
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 1000.0);
}

TEST(PerfectSecrecyTest, AnswersUncorrelatedWithTruth) {
  Rng rng(9), noise(10);
  Query q = Query::Sum("x");
  q.public_max_rows = 20;
  std::vector<double> truth, answer;
  for (int rep = 0; rep < 2000; ++rep) {
    const MicrodataTable t = testing::RandomNumericTable(rng, 1 + rng.UniformIndex(20), 1)
                                 .SelectAttributes(std::vector<std::size_t>{0});
    Query qq = Query::Sum("q0");
    qq.public_max_rows = 20;
    truth.push_back(EvaluateQuery(qq, t));
    answer.push_back(PerfectSecrecyMechanism(qq, t.schema(), noise));
  }
  const double mt = Mean(truth), ma = Mean(answer);
  double cov = 0, vt = 0, va = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    cov += (truth[i] - mt) * (answer[i] - ma);
    vt += (truth[i] - mt) * (truth[i] - mt);
    va += (answer[i] - ma) * (answer[i] - ma);
  }
  EXPECT_LT(std::abs(cov / std::sqrt(vt * va)), 0.08);
}

TEST(PerfectSecrecyTest, CountNeedsPublicBound) {
  Rng rng(1);
  EXPECT_EQ(CodeOf([&] { PerfectSecrecyMechanism(Query::Count(), kHundred, rng); }),
            ErrorCode::kUnboundedDomain);
}

TEST(DpMicrodataTest, HugeEpsilonKeepsData) {
  Rng rng(6);
  const MicrodataTable t = testing::RandomNumericTable(rng, 50, 2);
  const AnonymizedRelease r = DpMicrodataRelease(t, 1e9, 1);
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    for (std::size_t j = 0; j < t.num_attributes(); ++j) {
      EXPECT_NEAR(r.table.number(i, j), t.number(i, j), 1e-3);
    }
  }
}

TEST(DpMicrodataTest, SmallEpsilonScaleAndClamping) {
  Rng rng(6);
  const MicrodataTable t = Values({10, 20, 30, 40, 50});
  const AnonymizedRelease r = DpMicrodataRelease(t, 0.1, 3);
  EXPECT_DOUBLE_EQ(r.provenance.details["epsilon_per_cell"].get<double>(), 0.1);
  // Scale = width / epsilon_cell = 100 / 0.1.
  Rng replay(3);
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    const double expected = std::clamp(t.number(i, 0) + replay.Laplace(1000.0), 0.0, 100.0);
    EXPECT_EQ(r.table.number(i, 0), expected);
  }
  Rng many(4);
  for (int rep = 0; rep < 50; ++rep) {
    const MicrodataTable big = testing::RandomNumericTable(many, 20, 3);
    const AnonymizedRelease out = DpMicrodataRelease(big, 0.5, many.NextU64());
    for (std::size_t i = 0; i < out.table.num_rows(); ++i) {
      for (std::size_t j = 0; j < out.table.num_attributes(); ++j) {
        EXPECT_GE(out.table.number(i, j), out.table.attribute(j).min);
        EXPECT_LE(out.table.number(i, j), out.table.attribute(j).max);
      }
    }
  }
}

TEST(DpMicrodataTest, RejectsCategorical) {
  EXPECT_EQ(CodeOf([] { DpMicrodataRelease(testing::Labels("d", {"a"}), 1, 1); }),
            ErrorCode::kNonNumeric);
}

// Max log-density ratio of the 1-D metric mechanism at two inputs.
EmpiricalDpResult MetricCheck(double distance, int samples, std::uint64_t seed) {
  Rng r1(seed), r2(seed + 1);
  std::vector<double> a(static_cast<std::size_t>(samples)), b(a.size());
  for (double& v : a) v = MetricDpMechanism(0.0, 1.0, r1);
  for (double& v : b) v = MetricDpMechanism(distance, 1.0, r2);
  return CheckLogRatio(a, b, distance, 64);
}

TEST(MetricDpTest, SameInputIndistinguishable) {
  const EmpiricalDpResult r = MetricCheck(0.0, 200000, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_log_ratio, r.slack);
}

TEST(MetricDpTest, DistanceTwoBoundedByTwo) {
  const EmpiricalDpResult r = MetricCheck(2.0, 1000000, 3);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_log_ratio, 2.0 + r.slack);
  EXPECT_GT(r.max_log_ratio, 1.5);
}

TEST(MetricDpTest, RatioGrowsWithDistance) {
  double previous = -1;
  for (double d : {0.25, 1.0, 2.0, 3.0}) {
    const EmpiricalDpResult r = MetricCheck(d, 400000, 11);
    EXPECT_GT(r.max_log_ratio, previous) << "d = " << d;
    previous = r.max_log_ratio;
  }
}

TEST(MetricDpTest, PlanarRadiusMean) {
  Rng rng(2);
  double total = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    total += (MetricDpMechanism(Eigen::Vector2d(3, 4), 2.0, rng) - Eigen::Vector2d(3, 4)).norm();
  }
  // Gamma(2, 1/epsilon) has mean 2 / epsilon.
  EXPECT_NEAR(total / n, 1.0, 0.01);
}

TEST(ConversionTest, RdpExamplesAndLimits) {
  EXPECT_NEAR(RdpToDp(2, 1, 1e-6), 1 + std::log(1e6), 1e-9);
  EXPECT_NEAR(RdpToDp(2, 1, 1 - 1e-12), 1.0, 1e-9);
  EXPECT_EQ(RdpToDp(std::numeric_limits<double>::infinity(), 0.7, 1e-6), 0.7);
  EXPECT_NEAR(RdpToDp(1e9, 0.7, 1e-6), 0.7, 1e-6);
  EXPECT_EQ(CodeOf([] { RdpToDp(1, 1, 1e-6); }), ErrorCode::kInvalidAlpha);
  EXPECT_EQ(CodeOf([] { RdpToDp(2, 1, 0); }), ErrorCode::kInvalidDelta);
}

TEST(ConversionTest, ZcdpExamplesAndLimits) {
  EXPECT_NEAR(ZcdpToDp(0.1, 1e-6), 2.4508, 1e-4);
  EXPECT_NEAR(ZcdpToDp(0.1, 1 - 1e-15), 0.1, 1e-6);
  EXPECT_EQ(CodeOf([] { ZcdpToDp(0, 1e-6); }), ErrorCode::kInvalidRho);
}

TEST(EmpiricalDpCheckTest, LaplaceCountWithinEpsilon) {
  const MicrodataTable t1 = Values({1, 2, 3, 4});
  const MicrodataTable t2 = Values({1, 2, 3});
  const ScalarMechanism laplace = [](const MicrodataTable& t, Rng& rng) {
    return LaplaceMechanism(EvaluateQuery(Query::Count(), t), 1.0, 1.0, rng);
  };
  const EmpiricalDpResult r = EmpiricalDpCheck(laplace, t1, t2, 1.0, 64, 100000, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_log_ratio, 1.0 + r.slack);
}

TEST(EmpiricalDpCheckTest, PerfectSecrecyNearZero) {
  const MicrodataTable t1 = Values({1, 2, 3, 4});
  const MicrodataTable t2 = Values({1, 2, 3});
  const ScalarMechanism secret = [](const MicrodataTable& t, Rng& rng) {
    Query q = Query::Count();
    q.public_max_rows = 100;
    return PerfectSecrecyMechanism(q, t.schema(), rng);
  };
  const EmpiricalDpResult r = EmpiricalDpCheck(secret, t1, t2, 0.0, 20, 100000, 2);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_log_ratio, r.slack);
}

TEST(EmpiricalDpCheckTest, HalfScaleFails) {
  const MicrodataTable t1 = Values({1, 2, 3, 4});
  const MicrodataTable t2 = Values({1, 2, 3});
  const ScalarMechanism broken = [](const MicrodataTable& t, Rng& rng) {
    return LaplaceMechanism(EvaluateQuery(Query::Count(), t), 0.5, 1.0, rng);
  };
  const EmpiricalDpResult r = EmpiricalDpCheck(broken, t1, t2, 1.0, 64, 100000, 3);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_log_ratio, 1.5);
}

TEST(EmpiricalDpCheckTest, RequiresNeighbors) {
  const ScalarMechanism any = [](const MicrodataTable&, Rng& rng) { return rng.Uniform01(); };
  EXPECT_EQ(CodeOf([&] {
              EmpiricalDpCheck(any, Values({1, 2, 3}), Values({1}), 1, 8, 10, 1);
            }),
            ErrorCode::kNotNeighbors);
}

TEST(QueryTest, JsonRoundTripAndEvaluation) {
  Query q = Query::Count(Predicate{"x", Predicate::Op::kGe, 5.0});
  q.public_max_rows = 9;
  const Query back = Query::FromJson(q.ToJson());
  EXPECT_EQ(back.ToJson(), q.ToJson());
  const MicrodataTable t = Values({1, 5, 7});
  EXPECT_EQ(EvaluateQuery(back, t), 2.0);
  EXPECT_EQ(EvaluateQuery(Query::Mean("x", 3), t), 13.0 / 3.0);
  EXPECT_EQ(EvaluateQuery(Query::Max("x"), t), 7.0);
  EXPECT_EQ(EvaluateQuery(Query::Identity(1, "x"), t), 5.0);
}

}  // namespace
}  // namespace sdc
