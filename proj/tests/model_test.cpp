#include "bidopt/lp_model.hpp"

#include <gtest/gtest.h>

#include "bidopt/errors.hpp"
#include "bidopt/simplex.hpp"
#include "test_instances.hpp"

namespace bidopt {
namespace {

std::vector<double> dense_row(const LpModel& m, const std::string& name) {
  const auto& row = m.rows()[*m.row_index(name)];
  std::vector<double> out(m.num_columns(), 0.0);
  for (const auto& e : row.entries) out[e.column] += e.value;
  return out;
}

TEST(ValidateInstance, WellFormedToyHasNoViolations) {
  EXPECT_TRUE(validate_instance(testing::make_t1()).empty());
}

TEST(ValidateInstance, NonZeroSlackLevelIsReported) {
  Instance inst = testing::make_t1();
  inst.campaigns[0].levels[0].ret = 5.0;
  const auto v = validate_instance(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("slack level must be all-zero"), std::string::npos);
}

TEST(ValidateInstance, NegativeBudgetIsReported) {
  Instance inst = testing::make_t1();
  inst.businesses[0].budget = -1.0;
  const auto v = validate_instance(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("B_k"), std::string::npos);
}

TEST(ValidateInstance, DanglingBusinessReference) {
  Instance inst = testing::make_t1();
  inst.campaigns[0].business_id = "nope";
  EXPECT_FALSE(validate_instance(inst).empty());
}

TEST(ValidateInstance, NonConsecutiveLevelIndices) {
  Instance inst = testing::make_t1();
  inst.campaigns[0].levels[2].level_index = 5;
  EXPECT_FALSE(validate_instance(inst).empty());
}

TEST(BuildModel, ToyExpandsToHandComputedMatrix) {
  const LpModel m = build_model(testing::make_t1());
  ASSERT_EQ(m.num_columns(), 3);
  ASSERT_EQ(m.num_rows(), 4);
  EXPECT_EQ(m.sense, ObjectiveSense::kMaximize);
  EXPECT_EQ(m.columns()[0].name, "D_c1_0");
  EXPECT_EQ(m.columns()[2].name, "D_c1_2");
  EXPECT_EQ(m.columns()[1].objective, 50.0);
  EXPECT_EQ(m.columns()[2].objective, 120.0);

  // Hand expansion: spend = P*AV, click = P*(AV - CPC*CTR) with CPC*CTR = 0.8.
  EXPECT_EQ(dense_row(m, "CVX_c1"), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(m.rows()[*m.row_index("CVX_c1")].sense, RowSense::kEqual);
  EXPECT_EQ(m.rows()[*m.row_index("CVX_c1")].rhs, 1.0);
  EXPECT_EQ(dense_row(m, "BUD_k1"), (std::vector<double>{0, 50, 160}));
  EXPECT_EQ(m.rows()[*m.row_index("BUD_k1")].rhs, 100.0);
  const auto clk = dense_row(m, "CLK_k1");
  EXPECT_EQ(clk[0], 0.0);
  EXPECT_NEAR(clk[1], -30.0, 1e-12);
  EXPECT_NEAR(clk[2], 0.0, 1e-12);
  EXPECT_EQ(m.rows()[*m.row_index("CLK_k1")].rhs, 0.0);
  EXPECT_EQ(dense_row(m, "IMP"), (std::vector<double>{0, 100, 200}));
  EXPECT_EQ(m.rows()[*m.row_index("IMP")].rhs, 1000.0);

  ASSERT_EQ(m.sos_sets().size(), 1u);
  EXPECT_EQ(m.sos_sets()[0].name, "S_c1");
  EXPECT_EQ(m.sos_sets()[0].type, 1);
  EXPECT_EQ(m.sos_sets()[0].members, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(m.sos_sets()[0].weights, (std::vector<double>{0, 1, 2}));
  EXPECT_TRUE(m.check().empty());
}

TEST(BuildModel, RowCountsPerBusiness) {
  Instance inst = testing::make_t1();
  Instance other = testing::make_t1();
  inst.businesses.push_back(Business{"k2", 50.0, 3.0, {"c2"}});
  Campaign c = other.campaigns[0];
  c.id = "c2";
  c.business_id = "k2";
  inst.campaigns.push_back(c);
  const LpModel m = build_model(inst);
  EXPECT_EQ(m.num_columns(), 6);
  EXPECT_EQ(m.num_rows(), 2 + 2 * 2 + 1);
  EXPECT_TRUE(m.row_index("BUD_k2").has_value());
  EXPECT_TRUE(m.row_index("CLK_k2").has_value());
  EXPECT_EQ(m.rows().back().name, "IMP");
  EXPECT_EQ(dense_row(m, "IMP"), (std::vector<double>{0, 100, 200, 0, 100, 200}));
}

TEST(BuildModel, SlackOnlyCampaignTouchesOnlyItsConvexityRow) {
  Instance inst = testing::make_t1();
  inst.businesses[0].campaign_ids.push_back("c0");
  inst.campaigns.push_back(Campaign{"c0", "k1", 0.1, {BidLevel{}}});
  const LpModel m = build_model(inst);
  const int col = *m.column_index("D_c0_0");
  int appearances = 0;
  for (const auto& row : m.rows())
    for (const auto& e : row.entries)
      if (e.column == col) {
        ++appearances;
        EXPECT_EQ(row.name, "CVX_c0");
      }
  EXPECT_EQ(appearances, 1);
}

// CPC chosen so that CPC*CTR equals AV in exact arithmetic; the rounded
// difference must not survive as a click-row coefficient.
TEST(BuildModel, CancelledClickMarginIsDropped) {
  const double av = 0.058300000000000005, ctr = 0.1822, cpc = 0.3199780461031833;
  ASSERT_NE(av - cpc * ctr, 0.0);
  EXPECT_EQ(click_margin(av, cpc * ctr), 0.0);
  EXPECT_DOUBLE_EQ(click_margin(0.5, 0.8), -0.3);

  Instance inst;
  inst.impression_budget = 1e4;
  inst.businesses.push_back(Business{"k1", 1000.0, cpc, {"c1"}});
  Campaign c{"c1", "k1", ctr, {}};
  c.levels.push_back(BidLevel{0, 0.0, 0.0, 0.0, std::nullopt});
  c.levels.push_back(BidLevel{1, 1084.01, av, 4087.0, 0.3});
  inst.campaigns.push_back(std::move(c));
  const LpModel m = build_model(inst);
  EXPECT_TRUE(m.rows()[*m.row_index("CLK_k1")].entries.empty());
  EXPECT_NEAR(solve_lp(m, Bounds(m)).objective, 1084.01, 1e-9);
}

TEST(BuildModel, RejectsInvalidInstance) {
  Instance inst = testing::make_t1();
  inst.impression_budget = -5.0;
  EXPECT_THROW(build_model(inst), InputError);
}

TEST(BuildModel, SingleChoiceActivitiesMatchDirectSums) {
  const Instance inst = testing::make_t1();
  const LpModel m = build_model(inst);
  for (int j = 0; j < 3; ++j) {
    std::vector<double> x(3, 0.0);
    x[j] = 1.0;
    const auto& lv = inst.campaigns[0].levels[j];
    EXPECT_DOUBLE_EQ(m.row_activity(*m.row_index("BUD_k1"), x), lv.impressions * lv.ad_value);
    EXPECT_DOUBLE_EQ(m.objective_value(x), lv.ret);
  }
}

TEST(RelaxToSos2, OnlySetTypesChange) {
  const LpModel m = build_model(testing::make_t1());
  const LpModel r = relax_to_sos2(m);
  EXPECT_EQ(r.rows(), m.rows());
  EXPECT_EQ(r.columns(), m.columns());
  ASSERT_EQ(r.sos_sets().size(), 1u);
  EXPECT_EQ(r.sos_sets()[0].type, 2);
  EXPECT_EQ(r.sos_sets()[0].members, m.sos_sets()[0].members);
}

TEST(DecomposeByBusiness, PartitionsCampaigns) {
  Instance inst = testing::make_t1();
  for (int k = 2; k <= 3; ++k) {
    const std::string b = "k" + std::to_string(k);
    const std::string c = "c" + std::to_string(k);
    inst.businesses.push_back(Business{b, 100.0, 2.0, {c}});
    Campaign camp = testing::make_t1().campaigns[0];
    camp.id = c;
    camp.business_id = b;
    inst.campaigns.push_back(camp);
  }
  const auto parts = decompose_by_business(inst);
  ASSERT_EQ(parts.size(), 3u);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    EXPECT_TRUE(validate_instance(parts[k]).empty());
    ASSERT_EQ(parts[k].campaigns.size(), 1u);
    EXPECT_EQ(parts[k].campaigns[0].id, "c" + std::to_string(k + 1));
    EXPECT_EQ(parts[k].impression_budget, inst.impression_budget);
  }
}

TEST(DecomposeByBusiness, SingleBusinessIsIdentity) {
  const Instance inst = testing::make_t1();
  const auto parts = decompose_by_business(inst);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0], inst);
}

TEST(InstanceJson, RoundTrip) {
  const Instance inst = testing::make_gap_instance();
  EXPECT_EQ(instance_from_json(instance_to_json(inst)), inst);
}

TEST(InstanceJson, MissingFieldIsInputError) {
  auto j = instance_to_json(testing::make_t1());
  j.erase("impression_budget");
  EXPECT_THROW(instance_from_json(j), InputError);
}

TEST(ModelJson, RoundTrip) {
  const LpModel m = build_model(testing::make_gap_instance());
  EXPECT_EQ(model_from_json(model_to_json(m)), m);
}

}  // namespace
}  // namespace bidopt
