#include "bidopt/oracle.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

#include "bidopt/generate.hpp"
#include "test_instances.hpp"

namespace bidopt {
namespace {

TEST(EnumerateSos1, ToyPicksFirstLevel) {
  const auto r = enumerate_sos1(testing::make_t1());
  EXPECT_DOUBLE_EQ(r.objective, 50.0);
  EXPECT_EQ(r.levels, (std::vector<int>{1}));
}

TEST(EnumerateSos1, AllSlackInstanceIsZero) {
  Instance inst;
  inst.impression_budget = 10.0;
  inst.businesses.push_back(Business{"k1", 1.0, 1.0, {"a", "b"}});
  inst.campaigns.push_back(Campaign{"a", "k1", 0.1, {BidLevel{}}});
  inst.campaigns.push_back(Campaign{"b", "k1", 0.1, {BidLevel{}}});
  const auto r = enumerate_sos1(inst);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.levels, (std::vector<int>{0, 0}));
}

TEST(EnumerateSos1, ZeroImpressionBudgetForcesSlack) {
  Instance inst = testing::make_t1();
  inst.impression_budget = 0.0;
  const auto r = enumerate_sos1(inst);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.levels, (std::vector<int>{0}));
}

TEST(EnumerateSos1, CapIsEnforced) {
  GenParams p;
  p.campaigns_per_business = {12, 12};
  p.levels_per_campaign = {5, 5};
  const Instance inst = generate_instance(p);
  OracleOptions opt;
  opt.cap = 1000;
  EXPECT_THROW(enumerate_sos1(inst, opt), std::length_error);
  EXPECT_THROW(enumerate_sos2(inst, opt), std::length_error);
}

TEST(EnumerateSos2, ToyMatchesHandLp) {
  const auto r = enumerate_sos2(testing::make_t1());
  EXPECT_NEAR(r.objective, 900.0 / 11.0, 1e-9);
  ASSERT_EQ(r.choices.size(), 1u);
  EXPECT_EQ(r.choices[0].lower_level, 1);
  EXPECT_NEAR(r.choices[0].lower_weight, 6.0 / 11.0, 1e-9);
  EXPECT_NEAR(r.choices[0].upper_weight, 5.0 / 11.0, 1e-9);
}

TEST(EnumerateSos2, CollapsesToSos1WhenSos1IsLpOptimal) {
  // Budget large enough for the top level: the integral choice is the LP
  // optimum, so the relaxation gains nothing.
  Instance inst = testing::make_t1();
  inst.businesses[0].budget = 1000.0;
  inst.businesses[0].cpc = 10.0;
  EXPECT_NEAR(enumerate_sos2(inst).objective, enumerate_sos1(inst).objective, 1e-9);
  EXPECT_DOUBLE_EQ(enumerate_sos1(inst).objective, 120.0);
}

TEST(EnumerateSos2, GapInstanceKeepsAdjacentPairOnly) {
  // Levels 1 and 3 mix to 20 in the LP; only adjacent pairs are allowed, so
  // the best is level 2 alone (return 12, spend 20).
  const auto r = enumerate_sos2(testing::make_gap_instance());
  EXPECT_NEAR(r.objective, 12.0, 1e-9);
}

TEST(EnumerateSos2, ContainsSos1OnRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    GenParams p;
    p.campaigns_per_business = {3, 3};
    p.levels_per_campaign = {3, 3};
    p.budget_tightness = 0.5;
    p.click_margin = seed % 2 ? 1.0 : 0.6;
    p.seed = seed;
    const Instance inst = generate_instance(p);
    const auto s1 = enumerate_sos1(inst);
    const auto s2 = enumerate_sos2(inst);
    EXPECT_GE(s2.objective, s1.objective - 1e-9) << "seed " << seed;
    EXPECT_TRUE(check_assignment(inst, values_from_sos1(inst, s1.levels), 1).feasible);
    const auto c2 = check_assignment(inst, values_from_sos2(inst, s2.choices), 2);
    EXPECT_TRUE(c2.feasible) << "seed " << seed;
    EXPECT_NEAR(c2.objective, s2.objective, 1e-6 * std::max(1.0, s2.objective));
  }
}

TEST(CheckAssignment, DetectsViolations) {
  const Instance inst = testing::make_t1();
  EXPECT_TRUE(check_assignment(inst, {{0, 1, 0}}, 1).feasible);
  EXPECT_FALSE(check_assignment(inst, {{0, 0, 1}}, 1).feasible);          // budget
  EXPECT_FALSE(check_assignment(inst, {{0, 0.5, 0.5}}, 1).feasible);      // SOS1
  EXPECT_FALSE(check_assignment(inst, {{0.5, 0, 0.5}}, 2).feasible);      // adjacency
  EXPECT_FALSE(check_assignment(inst, {{0, 0.5, 0.4}}, 2).feasible);      // convexity
  const auto ok = check_assignment(inst, {{0, 6.0 / 11, 5.0 / 11}}, 2);
  EXPECT_TRUE(ok.feasible);
  EXPECT_NEAR(ok.objective, 900.0 / 11.0, 1e-9);
}

TEST(CheckAssignment, ClickRowIsEnforced) {
  // Spend 0.5*100 = 50 against click value CPC*CTR*P = 0.4*0.4*100 = 16.
  Instance inst = testing::make_t1();
  inst.businesses[0].cpc = 0.4;
  const auto r = check_assignment(inst, {{0, 1, 0}}, 1);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(enumerate_sos1(inst).objective, 0.0);
}

TEST(Decomposition, SumOfPartsEqualsJointWhenImpressionsSlack) {
  GenParams p;
  p.businesses = 2;
  p.campaigns_per_business = {2, 2};
  p.levels_per_campaign = {3, 3};
  p.budget_tightness = 0.6;
  p.impression_tightness = 10.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    p.seed = seed;
    const Instance inst = generate_instance(p);
    double parts = 0.0;
    for (const auto& sub : decompose_by_business(inst)) parts += enumerate_sos1(sub).objective;
    const double joint = enumerate_sos1(inst).objective;
    EXPECT_NEAR(parts, joint, 1e-6 * std::max(1.0, joint));
  }
}

}  // namespace
}  // namespace bidopt
