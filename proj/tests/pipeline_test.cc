#include <filesystem>
#include <map>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "sdc/error.h"
#include "sdc/pipeline.h"

namespace sdc {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

const std::string kData = std::string(SDC_TEST_DATA_DIR) + "/sample/";

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sdc_pipeline_test_" + name);
  fs::remove_all(dir);
  return dir;
}

RunConfig People(const std::string& mechanism, const fs::path& out) {
  RunConfig c;
  c.input = kData + "people.csv";
  c.schema = kData + "people.schema.json";
  c.hierarchies = kData + "hierarchies.json";
  c.mechanism = mechanism;
  c.params.k = 5;
  c.trials = 20;
  c.seed = 17;
  c.out_dir = out.string();
  return c;
}

std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), dir).generic_string()] = ReadFile(e.path().string());
    }
  }
  return out;
}

TEST(RunTest, MdavWritesEveryArtifact) {
  const fs::path dir = ScratchDir("mdav");
  RunConfig c = People("mdav", dir);
  c.attacks = {"linkage", "attribute_inference"};
  const RunResult r = sdc::Run(c);
  for (const char* f : {"config.json", "release.csv", "provenance.json", "private/row_ids.json",
                        "attacks/linkage.json", "attacks/attribute_inference.json",
                        "utility.json", "ledger.jsonl", "summary.txt", "manifest.json"}) {
    EXPECT_TRUE(fs::is_regular_file(dir / f)) << f;
  }
  const nlohmann::json manifest = nlohmann::json::parse(ReadFile((dir / "manifest.json").string()));
  EXPECT_EQ(manifest["files"]["release.csv"], Sha256Hex(ReadFile((dir / "release.csv").string())));
  EXPECT_FALSE(manifest["files"].contains("manifest.json"));
  EXPECT_EQ(manifest["inputs"].size(), 3u);
  // Identifiers never reach the release.
  EXPECT_THAT(ReadFile((dir / "release.csv").string()).substr(0, 40),
              ::testing::Not(HasSubstr("id,")));
  EXPECT_FALSE(r.budget.defined);
  EXPECT_THAT(r.summary, HasSubstr("k = 5"));
  EXPECT_LE(r.attacks["linkage"]["success_rate"].get<double>(), 0.2 + 0.05);
}

TEST(RunTest, SameConfigSameBytes) {
  const fs::path dir = ScratchDir("determinism");
  RunConfig c = People("cluster_and_permute", dir);
  sdc::Run(c);
  const auto first = Snapshot(dir);
  sdc::Run(c);
  EXPECT_EQ(Snapshot(dir), first);
  c.seed = 18;
  sdc::Run(c);
  EXPECT_NE(Snapshot(dir).at("release.csv"), first.at("release.csv"));
}

TEST(RunTest, AnatomyWritesTwoTables) {
  const fs::path dir = ScratchDir("anatomy");
  RunConfig c = People("mdav", dir);
  sdc::Run(c);
  c.mechanism = "anatomy";
  c.params.k = 3;
  c.params.l = 3;
  c.params.l_variant = "distinct";
  c.attacks = {"attribute_inference"};
  const RunResult r = sdc::Run(c);
  EXPECT_TRUE(fs::is_regular_file(dir / "qi.csv"));
  EXPECT_TRUE(fs::is_regular_file(dir / "conf.csv"));
  EXPECT_FALSE(fs::exists(dir / "release.csv"));
  EXPECT_THAT(r.summary, HasSubstr("l-diverse"));
}

TEST(RunTest, DpMicrodataAccountsBudget) {
  const fs::path dir = ScratchDir("dp");
  RunConfig c;
  c.input = kData + "workers.csv";
  c.schema = kData + "workers.schema.json";
  c.mechanism = "dp_microdata";
  c.params.epsilon = 0.5;
  c.attacks = {"linkage", "dp_check"};
  c.trials = 10;
  c.dp_check_trials = 20000;
  c.seed = 3;
  c.out_dir = dir.string();
  const RunResult r = sdc::Run(c);
  EXPECT_TRUE(r.budget.defined);
  EXPECT_DOUBLE_EQ(r.budget.epsilon, 0.5);
  EXPECT_EQ(r.attacks["dp_check"]["verdict"], "PASS");
  EXPECT_THAT(ReadFile((dir / "ledger.jsonl").string()), HasSubstr("dp_microdata"));
}

TEST(RunTest, AttackAndReportOnExistingDirectory) {
  const fs::path dir = ScratchDir("reattack");
  RunConfig c = People("mdav", dir);
  c.attacks = {};
  sdc::Run(c);
  EXPECT_FALSE(fs::exists(dir / "attacks" / "linkage.json"));
  const nlohmann::json report = AttackRunDirectory(dir.string(), "linkage", 10, 5);
  EXPECT_EQ(report["attack"], "linkage");
  EXPECT_THAT(ReadFile((dir / "summary.txt").string()), HasSubstr("linkage"));
  const nlohmann::json manifest = nlohmann::json::parse(ReadFile((dir / "manifest.json").string()));
  EXPECT_TRUE(manifest["files"].contains("attacks/linkage.json"));
  EXPECT_EQ(ReportRunDirectory(dir.string()), ReadFile((dir / "summary.txt").string()));
}

TEST(RunTest, InfeasibleAndInvalidConfigs) {
  const fs::path dir = ScratchDir("errors");
  RunConfig c = People("mdav", dir);
  c.params.k = 500;
  try {
    sdc::Run(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(IsInfeasibility(e.code()));
  }
  c = People("generalization", dir);
  c.params.l = 2;
  try {
    sdc::Run(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  c = People("mdav", dir);
  c.input = kData + "missing.csv";
  try {
    sdc::Run(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_FALSE(IsInfeasibility(e.code()));
  }
}

TEST(RunConfigTest, JsonRoundTripAndUnknownKeys) {
  RunConfig c = People("mdav", "out");
  c.qi_attributes = {"age", "zip"};
  c.params.t = 0.2;
  const RunConfig back = RunConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
  try {
    RunConfig::FromJson({{"mechansim", "mdav"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_THAT(e.what(), HasSubstr("mechansim"));
  }
}

TEST(SweepTest, OneRunPerValue) {
  const fs::path dir = ScratchDir("sweep");
  RunConfig c = People("mdav", dir);
  const std::vector<SweepPoint> points = Sweep(c, {2, 10});
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].parameter, "k");
  EXPECT_TRUE(fs::is_regular_file(dir / "k=2" / "release.csv"));
  EXPECT_TRUE(fs::is_regular_file(dir / "k=10" / "release.csv"));
  EXPECT_TRUE(fs::is_regular_file(dir / "sweep.csv"));
  EXPECT_GT(points[0].linkage_rate, points[1].linkage_rate);
  EXPECT_LT(points[0].sse_standardized, points[1].sse_standardized);
}

}  // namespace
}  // namespace sdc
