#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "sdc/error.h"
#include "sdc/ledger.h"

namespace sdc {
namespace {

using ::testing::Contains;
using ::testing::HasSubstr;
using ::testing::IsEmpty;

LedgerEntry Dp(double epsilon, double delta = 0.0,
               std::optional<std::string> group = std::nullopt) {
  LedgerEntry e;
  e.mechanism = "laplace";
  e.epsilon = epsilon;
  e.delta = delta;
  e.disjoint_group = std::move(group);
  return e;
}

TEST(LedgerTest, SequentialAdds) {
  BudgetLedger ledger;
  ledger.Append(Dp(0.5));
  ledger.Append(Dp(0.5));
  const EffectiveBudget b = ledger.Effective();
  EXPECT_TRUE(b.defined);
  EXPECT_DOUBLE_EQ(b.epsilon, 1.0);
  EXPECT_THAT(b.warnings, IsEmpty());
}

TEST(LedgerTest, DisjointTakesMaximum) {
  BudgetLedger ledger;
  ledger.Append(Dp(0.3, 1e-6, "region"));
  ledger.Append(Dp(0.8, 1e-7, "region"));
  ledger.Append(Dp(0.5, 0.0, "region"));
  const EffectiveBudget b = ledger.Effective();
  EXPECT_DOUBLE_EQ(b.epsilon, 0.8);
  EXPECT_DOUBLE_EQ(b.delta, 1e-6);
}

TEST(LedgerTest, MixedSequentialAndGroups) {
  BudgetLedger ledger;
  ledger.Append(Dp(0.2, 1e-6));
  ledger.Append(Dp(0.3, 0, "a"));
  ledger.Append(Dp(0.4, 0, "a"));
  ledger.Append(Dp(0.1, 0, "b"));
  EXPECT_DOUBLE_EQ(ledger.Effective().epsilon, 0.2 + 0.4 + 0.1);
  EXPECT_DOUBLE_EQ(ledger.Effective().delta, 1e-6);
}

TEST(LedgerTest, FiftyRunsWarnMostlyVoid) {
  BudgetLedger ledger;
  for (int i = 0; i < 50; ++i) ledger.Append(Dp(1.0));
  const EffectiveBudget b = ledger.Effective();
  EXPECT_DOUBLE_EQ(b.epsilon, 50.0);
  EXPECT_THAT(b.warnings, Contains(HasSubstr("mostly void")));
  EXPECT_THAT(b.warnings, Contains(HasSubstr("empirical check")));
}

TEST(LedgerTest, ThresholdsAreStrict) {
  BudgetLedger one;
  one.Append(Dp(1.0));
  EXPECT_THAT(one.Effective().warnings, IsEmpty());
  BudgetLedger ten;
  ten.Append(Dp(10.0));
  EXPECT_THAT(ten.Effective().warnings, Not(Contains(HasSubstr("mostly void"))));
}

TEST(LedgerTest, KAnonymityMakesCompositionUndefined) {
  BudgetLedger ledger;
  ledger.Append(Dp(0.5));
  LedgerEntry k;
  k.mechanism = "mdav";
  k.model = "k_anonymity";
  ledger.Append(k);
  const EffectiveBudget b = ledger.Effective();
  EXPECT_FALSE(b.defined);
  EXPECT_EQ(b.ToJson()["epsilon"], "undefined");
  EXPECT_THAT(b.warnings, Contains(HasSubstr("undefined")));
}

TEST(LedgerTest, JsonLinesRoundTrip) {
  BudgetLedger ledger;
  ledger.Append(Dp(0.25, 1e-9, "g"));
  ledger.Append(Dp(2.0));
  const std::string text = ledger.ToJsonLines();
  const BudgetLedger back = BudgetLedger::FromJsonLines(text + "\n");
  EXPECT_EQ(back.ToJsonLines(), text);
  EXPECT_EQ(back.entries().size(), 2u);
  EXPECT_EQ(back.entries()[0].disjoint_group, "g");
}

TEST(LedgerTest, RejectsBadEntries) {
  BudgetLedger ledger;
  try {
    ledger.Append(Dp(-1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveEpsilon);
  }
  try {
    ledger.Append(Dp(1, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidDelta);
  }
  try {
    BudgetLedger::FromJsonLines("{\"mechanism\": \"x\", \"epsilon\": 1}\nnot json\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_THAT(e.what(), HasSubstr("line 2"));
  }
  EXPECT_TRUE(ledger.entries().empty());
}

TEST(LedgerTest, ComposeReturnsGrownLedger) {
  BudgetLedger ledger;
  ledger.Append(Dp(0.5));
  const Composition c = Compose(ledger, Dp(0.5));
  EXPECT_EQ(c.ledger.entries().size(), 2u);
  EXPECT_DOUBLE_EQ(c.effective.epsilon, 1.0);
  EXPECT_EQ(ledger.entries().size(), 1u);
}

}  // namespace
}  // namespace sdc
