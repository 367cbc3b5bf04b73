#include "bidopt/mps.hpp"

#include <gtest/gtest.h>

#include <limits>

#include "bidopt/errors.hpp"
#include "bidopt/generate.hpp"
#include "bidopt/solution_io.hpp"
#include "test_instances.hpp"

namespace bidopt {
namespace {

std::string golden(const std::string& name) {
  return read_text_file(std::string(BIDOPT_TEST_DATA_DIR) + "/" + name);
}

void expect_parse_error(const std::string& text, const std::string& fragment) {
  try {
    read_mps(text);
    FAIL() << "expected a parse error containing '" << fragment << "'";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(WriteMps, ToyMatchesGolden) {
  EXPECT_EQ(write_mps(build_model(testing::make_t1())), golden("t1.mps"));
}

TEST(WriteMps, ToyStructure) {
  const LpModel m = read_mps(golden("t1.mps"));
  EXPECT_EQ(m.num_columns(), 3);
  EXPECT_EQ(m.num_rows(), 4);
  ASSERT_EQ(m.sos_sets().size(), 1u);
  EXPECT_EQ(m.sos_sets()[0].type, 1);
  EXPECT_EQ(m.sos_sets()[0].weights, (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(m.sense, ObjectiveSense::kMaximize);
}

TEST(ReadMps, RoundTripToy) {
  const LpModel m = build_model(testing::make_t1());
  EXPECT_EQ(read_mps(write_mps(m)), m);
  const LpModel r = relax_to_sos2(m);
  EXPECT_EQ(read_mps(write_mps(r)), r);
}

TEST(ReadMps, RoundTripGeneratedIsExact) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    GenParams p;
    p.businesses = 3;
    p.campaigns_per_business = {1, 6};
    p.levels_per_campaign = {1, 6};
    p.budget_tightness = 0.7;
    p.click_margin = 0.6;
    p.seed = seed;
    const LpModel m = build_model(generate_instance(p));
    const std::string text = write_mps(m);
    const LpModel back = read_mps(text);
    EXPECT_EQ(back, m) << "seed " << seed;
    EXPECT_EQ(write_mps(back), text);
  }
}

TEST(ReadMps, RoundTripGeneralBounds) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  LpModel m;
  m.name = "GENERAL";
  m.sense = ObjectiveSense::kMinimize;
  m.add_column(Column{"free", 1.0, -inf, inf});
  m.add_column(Column{"neg", -2.5, -inf, 4.0});
  m.add_column(Column{"fixed", 0.1, 0.3, 0.3});
  m.add_column(Column{"lowered", 1e-300, -7.0, inf});
  m.add_row(Row{"g", RowSense::kGreaterEqual, -1.0, {{0, 1.0}, {3, 0.1}}});
  m.add_row(Row{"e", RowSense::kEqual, 0.0, {{1, 3.0}, {2, -1e-12}}});
  EXPECT_EQ(read_mps(write_mps(m)), m);
}

TEST(ReadMps, UnknownColumnInSosNamesLine) {
  std::string text = golden("t1.mps");
  const auto pos = text.find("    D_c1_2    2");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 15, "    D_c1_9    2");
  // Line 33 of the golden file holds the third member.
  expect_parse_error(text, "line 33, column 5: unknown column 'D_c1_9'");
}

TEST(ReadMps, NonIncreasingWeights) {
  std::string text = golden("t1.mps");
  const auto pos = text.find("    D_c1_2    2");
  text.replace(pos, 15, "    D_c1_2    1");
  expect_parse_error(text, "reference weights must be strictly increasing");
}

TEST(ReadMps, UnknownRowInColumns) {
  std::string text = golden("t1.mps");
  const auto pos = text.find("D_c1_1    IMP");
  text.replace(pos, 13, "D_c1_1    XXX");
  expect_parse_error(text, "unknown row 'XXX'");
}

TEST(ReadMps, MalformedInput) {
  expect_parse_error("NAME x\nROWS\n N  OBJ\n", "missing ENDATA");
  expect_parse_error("NAME x\nRANGES\nENDATA\n", "unsupported section 'RANGES'");
  expect_parse_error("NAME x\nROWS\n Q  r\nENDATA\n", "unknown row type 'Q'");
  expect_parse_error("NAME x\nROWS\n N  OBJ\n L  r\nCOLUMNS\n    x  r  abc\nENDATA\n",
                     "expected a number");
  expect_parse_error("NAME x\n    stray\nENDATA\n", "outside a section");
}

TEST(ReadMps, ObjectiveSenseDefaultsToMax) {
  const LpModel m = read_mps("NAME x\nROWS\n N  OBJ\nCOLUMNS\n    a  OBJ  1\nENDATA\n");
  EXPECT_EQ(m.sense, ObjectiveSense::kMaximize);
  EXPECT_EQ(m.columns()[0].upper, std::numeric_limits<double>::infinity());
  const LpModel n =
      read_mps("NAME x\nOBJSENSE\n    MIN\nROWS\n N  OBJ\nCOLUMNS\n    a  OBJ  1\nENDATA\n");
  EXPECT_EQ(n.sense, ObjectiveSense::kMinimize);
}

}  // namespace
}  // namespace bidopt
