#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "sdc/csv.h"
#include "sdc/error.h"
#include "sdc/hierarchy.h"
#include "sdc/table.h"
#include "support.h"

namespace sdc {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

const nlohmann::json kZipDisease = {
    {"zip", {{"role", "quasi_identifier"}, {"kind", "categorical"},
             {"domain", {"43007", "43008", "08001"}}}},
    {"disease", {{"role", "confidential"}, {"kind", "categorical"},
                 {"domain", {"flu", "cancer"}}}}};

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(CsvTest, QuotedFieldsAndCrlf) {
  const auto records = ParseCsv("a,b\r\n\"x,\"\"y\"\"\",2\r\n\"line\nbreak\",3\n");
  ASSERT_EQ(records.size(), 3u);
  EXPECT_THAT(records[1], ElementsAre("x,\"y\"", "2"));
  EXPECT_THAT(records[2], ElementsAre("line\nbreak", "3"));
}

TEST(CsvTest, RaggedRowNamesLine) {
  try {
    ParseCsv("a,b\n1,2\n3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedCsv);
    EXPECT_THAT(e.what(), HasSubstr("line 3"));
  }
}

TEST(CsvTest, EscapeRoundTrip) {
  const std::vector<CsvRecord> records = {{"a", "b,c"}, {"\"q\"", "x\ny"}};
  EXPECT_EQ(ParseCsv(WriteCsv(records)), records);
}

TEST(LoadTableTest, ThreeRowsTwoAttributes) {
  const MicrodataTable t =
      LoadTable("zip,disease\n43007,flu\n43008,cancer\n08001,flu\n", kZipDisease);
  EXPECT_EQ(t.num_rows(), 3u);
  EXPECT_EQ(t.num_attributes(), 2u);
  EXPECT_EQ(t.text(2, 0), "08001");
  EXPECT_THAT(t.row_ids(), ElementsAre(0, 1, 2));
}

TEST(LoadTableTest, NonNumberIsDomainViolation) {
  const nlohmann::json schema = {
      {"age", {{"role", "quasi_identifier"}, {"kind", "numeric"}, {"domain", {0, 120}}}}};
  try {
    LoadTable("age\nabc\n", schema);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomainViolation);
    EXPECT_THAT(e.what(), HasSubstr("row 0"));
    EXPECT_THAT(e.what(), HasSubstr("age"));
  }
}

TEST(LoadTableTest, MissingColumn) {
  nlohmann::json schema = kZipDisease;
  schema["sex"] = {{"role", "quasi_identifier"}, {"kind", "categorical"}, {"domain", {"F", "M"}}};
  try {
    LoadTable("zip,disease\n43007,flu\n", schema);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingColumn);
    EXPECT_THAT(e.what(), HasSubstr("sex"));
  }
}

TEST(LoadTableTest, RejectsEmptyCellsAndUndeclaredColumns) {
  EXPECT_EQ(CodeOf([] { LoadTable("zip,disease\n43007,\n", kZipDisease); }),
            ErrorCode::kDomainViolation);
  EXPECT_EQ(CodeOf([] { LoadTable("zip,disease,x\n43007,flu,1\n", kZipDisease); }),
            ErrorCode::kMalformedCsv);
  EXPECT_EQ(CodeOf([] { LoadTable("zip,disease\n99999,flu\n", kZipDisease); }),
            ErrorCode::kDomainViolation);
}

TEST(LoadTableTest, NormalizesToNfc) {
  const nlohmann::json schema = {
      {"city", {{"role", "quasi_identifier"}, {"kind", "categorical"},
                {"domain", {"Z\xC3\xBCrich"}}}}};
  // Decomposed u + combining diaeresis.
  const MicrodataTable t = LoadTable("city\nZu\xCC\x88rich\n", schema);
  EXPECT_EQ(t.text(0, 0), "Z\xC3\xBCrich");
}

TEST(LoadTableTest, SerializeRoundTrip) {
  const std::string csv = "zip,disease\n43007,flu\n08001,cancer\n";
  EXPECT_EQ(SerializeTable(LoadTable(csv, kZipDisease)), csv);
}

TEST(SchemaTest, JsonRoundTripAndUnboundedDomain) {
  const nlohmann::json doc = {
      {"income", {{"role", "confidential"}, {"kind", "numeric"}, {"domain", {0, nullptr}}}}};
  const Schema schema = SchemaFromJson(doc);
  ASSERT_EQ(schema.size(), 1u);
  EXPECT_FALSE(schema[0].HasFiniteDomain());
  EXPECT_EQ(SchemaFromJson(SchemaToJson(schema)), schema);
  EXPECT_EQ(CodeOf([] { SchemaFromJson({{"x", {{"role", "boss"}, {"kind", "numeric"}}}}); }),
            ErrorCode::kInvalidSchema);
}

TEST(SuppressIdentifiersTest, DropsOnlyIdentifiers) {
  const MicrodataTable t(
      {AttributeSchema::Categorical("ssn", Role::kIdentifier, {"1", "2"}),
       AttributeSchema::Categorical("zip", Role::kQuasiIdentifier, {"43007"})},
      {{std::string("1"), std::string("43007")}, {std::string("2"), std::string("43007")}});
  const MicrodataTable out = SuppressIdentifiers(t);
  ASSERT_EQ(out.num_attributes(), 1u);
  EXPECT_EQ(out.attribute(0).name, "zip");
  EXPECT_EQ(out.num_rows(), 2u);
}

TEST(SuppressIdentifiersTest, NoIdentifiersIsIdentity) {
  const MicrodataTable t = testing::Column({1, 2, 3});
  EXPECT_EQ(SuppressIdentifiers(t), t);
}

TEST(SuppressIdentifiersTest, OnlyIdentifiersKeepsRows) {
  const MicrodataTable t = testing::Column({1, 2, 3}, 0, 10, Role::kIdentifier);
  const MicrodataTable out = SuppressIdentifiers(t);
  EXPECT_EQ(out.num_attributes(), 0u);
  EXPECT_EQ(out.num_rows(), 3u);
}

TEST(TableTest, ConstructorValidatesDomain) {
  EXPECT_EQ(CodeOf([] { testing::Column({1, 200}); }), ErrorCode::kDomainViolation);
  EXPECT_EQ(CodeOf([] { testing::Column({1}).AttributeIndex("nope"); }),
            ErrorCode::kUnknownAttribute);
}

TEST(NeighborTest, AddRemoveAndReplace) {
  const MicrodataTable a = testing::Column({1, 2, 3});
  const MicrodataTable b = testing::Column({3, 1});
  const MicrodataTable c = testing::Column({1, 2, 7});
  EXPECT_TRUE(AreNeighbors(a, b, NeighborModel::kAddRemove));
  EXPECT_TRUE(AreNeighbors(b, a, NeighborModel::kAddRemove));
  EXPECT_FALSE(AreNeighbors(a, c, NeighborModel::kAddRemove));
  EXPECT_TRUE(AreNeighbors(a, c, NeighborModel::kReplace));
  EXPECT_FALSE(AreNeighbors(a, b, NeighborModel::kReplace));
  EXPECT_FALSE(AreNeighbors(a, a, NeighborModel::kReplace));
}

TEST(FormatNumberTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatNumber(0.1), "0.1");
  EXPECT_EQ(FormatNumber(42), "42");
  EXPECT_EQ(std::stod(FormatNumber(1.0 / 3.0)), 1.0 / 3.0);
}

GeneralizationHierarchy Zip() {
  return GeneralizationHierarchy::FromJson(
      {{"attribute", "zip"},
       {"tree", {{"*", {{"4300*", {{"43007", {}}, {"43008", {}}}},
                        {"0800*", {{"08001", {}}}}}}}}});
}

TEST(HierarchyTest, CountryLevelOne) {
  const auto h = GeneralizationHierarchy::FromJson(
      {{"attribute", "country"}, {"tree", {{"Country", {{"USA", {}}, {"France", {}}}}}}});
  EXPECT_EQ(h.Generalize(std::string("USA"), 1), "Country");
  EXPECT_EQ(h.height(), 1);
}

TEST(HierarchyTest, LevelZeroIsIdentity) {
  EXPECT_EQ(Zip().Generalize(std::string("43008"), 0), "43008");
  const auto ages = GeneralizationHierarchy::Intervals("x", {{{1, 5}, {6, 10}}, {{1, 10}}});
  EXPECT_EQ(ages.Generalize(7.0, 0), "7");
}

TEST(HierarchyTest, ZipRootCoversDomain) {
  const GeneralizationHierarchy h = Zip();
  EXPECT_EQ(h.Generalize(std::string("43007"), 1), "4300*");
  EXPECT_EQ(h.Generalize(std::string("43007"), 2), "*");
  EXPECT_THAT(h.LeavesUnder("4300*"), ElementsAre("43007", "43008"));
  EXPECT_TRUE(h.Covers("*", std::string("08001")));
  EXPECT_FALSE(h.Covers("4300*", std::string("08001")));
  EXPECT_EQ(h.LevelOf("0800*"), 1);
  EXPECT_EQ(h.LevelOf("nope"), std::nullopt);
}

TEST(HierarchyTest, Errors) {
  const GeneralizationHierarchy h = Zip();
  EXPECT_EQ(CodeOf([&] { h.Generalize(std::string("99999"), 1); }), ErrorCode::kUnknownValue);
  EXPECT_EQ(CodeOf([&] { h.Generalize(std::string("43007"), 3); }), ErrorCode::kLevelOutOfRange);
  // Leaves at different depths.
  EXPECT_EQ(CodeOf([] {
              GeneralizationHierarchy::FromJson(
                  {{"attribute", "z"}, {"tree", {{"*", {{"a", {}}, {"b*", {{"b", {}}}}}}}}});
            }),
            ErrorCode::kInvalidHierarchy);
  // Not nested.
  EXPECT_EQ(CodeOf([] {
              GeneralizationHierarchy::Intervals("x", {{{1, 6}, {7, 10}}, {{1, 5}, {6, 10}},
                                                       {{1, 10}}});
            }),
            ErrorCode::kInvalidHierarchy);
}

TEST(HierarchyTest, IntervalLadder) {
  const auto h = GeneralizationHierarchy::Intervals("x", {{{1, 5}, {6, 10}}, {{1, 10}}});
  EXPECT_EQ(h.Generalize(3.0, 1), "[1,5]");
  EXPECT_EQ(h.Generalize(9.0, 2), "[1,10]");
  EXPECT_EQ(h.LevelOf("[6,10]"), 1);
  EXPECT_THAT(h.LeavesUnder("[6,10]"), ElementsAre("6", "7", "8", "9", "10"));
  EXPECT_TRUE(h.Covers("[1,5]", 5.0));
  EXPECT_FALSE(h.Covers("[1,5]", 6.0));
  EXPECT_EQ(GeneralizationHierarchy::FromJson(h.ToJson()).Generalize(6.0, 1), "[6,10]");
}

}  // namespace
}  // namespace sdc
