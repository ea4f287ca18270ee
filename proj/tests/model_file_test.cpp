#include <gtest/gtest.h>

#include "mdpr/model_file.hpp"
#include "test_support.hpp"

namespace mdpr {
namespace {

std::string input_error(const std::string& text) {
  try {
    parse_model(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InputError);
    return e.what();
  }
  ADD_FAILURE() << "no error for: " << text;
  return {};
}

TEST(ParseModel, FixtureA) {
  const auto d = load_model(testing::fixture_path("fix_a.json"));
  ASSERT_EQ(d.mdp.num_states(), 2u);
  EXPECT_DOUBLE_EQ(d.mdp.row(0, 0).kernel.at(0).mass, 0.5);
  EXPECT_DOUBLE_EQ(d.mdp.cost(1, 0), 2.0);
  EXPECT_FALSE(d.v.has_value());
  EXPECT_FALSE(d.ell.has_value());
}

TEST(ParseModel, GoldenChainGenerator) {
  const auto d = load_model(testing::fixture_path("remark1.json"));
  EXPECT_EQ(d.mdp.num_states(), 5u);
  ASSERT_TRUE(d.ell.has_value());
  EXPECT_EQ(*d.ell, "ell");
  ASSERT_TRUE(d.remark1.has_value());
}

TEST(ParseModel, InventoryGenerator) {
  const auto d = load_model(testing::fixture_path("fix_inv.json"));
  EXPECT_EQ(d.mdp.num_states(), 6u);
  EXPECT_EQ(*d.ell, "0_L");
  EXPECT_TRUE(d.mdp.is_row_stochastic());
  ASSERT_TRUE(d.inventory.has_value());
  EXPECT_DOUBLE_EQ(d.inventory->holding[4], 2.0);
  const auto l = load_model(testing::fixture_path("fix_inv_lost_sale.json"));
  EXPECT_TRUE(l.terminate_on_lost_sale);
  EXPECT_FALSE(l.mdp.is_row_stochastic());
}

TEST(ParseModel, OptionalKeys) {
  const auto d = parse_model(R"({"states": ["a", "b"], "actions": {"a": ["x"], "b": ["x"]},
    "cost": [["a", "x", 1], ["b", "x", 0]], "V": {"b": 2.5}, "ell": "b"})");
  ASSERT_TRUE(d.v.has_value());
  EXPECT_DOUBLE_EQ(d.v->values[0], 1.0);
  EXPECT_DOUBLE_EQ(d.v->values[1], 2.5);
  EXPECT_EQ(*d.ell, "b");
}

TEST(ParseModel, UnknownKernelTargetNamesLabel) {
  const auto msg = input_error(R"({"states": ["a"], "actions": {"a": ["x"]},
    "kernel": [["a", "x", "nowhere", 0.5]], "cost": [["a", "x", 1]]})");
  EXPECT_NE(msg.find("nowhere"), std::string::npos);
  EXPECT_NE(msg.find("kernel[0]"), std::string::npos);
}

TEST(ParseModel, StructuralErrors) {
  EXPECT_NE(input_error(R"({"states": ["a", "a"], "actions": {}, "cost": []})").find("duplicate"),
            std::string::npos);
  EXPECT_NE(input_error(R"({"states": ["a"], "actions": {"a": ["x"]}, "cost": []})").find("missing"),
            std::string::npos);
  EXPECT_NE(input_error(R"({"states": ["a"], "actions": {"a": ["x"]},
    "cost": [["a", "x", 1], ["a", "x", 2]]})").find("duplicate cost"), std::string::npos);
  EXPECT_NE(input_error(R"({"states": ["a"], "actions": {"a": ["x"]},
    "cost": [["a", "y", 1]]})").find("unknown action 'y'"), std::string::npos);
  EXPECT_NE(input_error(R"({"states": ["a"], "actions": {"a": ["x"]},
    "cost": [["a", "x", 1]], "remark1": {"grid": [0.2]}})").find("mutually exclusive"),
            std::string::npos);
  EXPECT_NE(input_error(R"({"states": ["a"], "actions": {"a": ["x"]},
    "cost": [["a", "x", 1]], "V": {"a": 0.5}})").find("V.a"), std::string::npos);
  EXPECT_NE(input_error(R"({"states": ["a"], "actions": {"a": ["x"]},
    "cost": [["a", "x", 1]], "ell": "q"})").find("'q'"), std::string::npos);
}

TEST(ParseModel, ValueViolationsAreReported) {
  const auto msg = input_error(R"({"states": ["a"], "actions": {"a": ["x"]},
    "kernel": [["a", "x", "a", -0.5]], "cost": [["a", "x", 1]]})");
  EXPECT_NE(msg.find("negative mass"), std::string::npos);
  EXPECT_NE(input_error(R"({"states": ["a"], "actions": {},
    "cost": []})").find("empty action set"), std::string::npos);
}

TEST(ParseModel, MalformedJsonReportsLine) {
  const auto msg = input_error("{\n  \"states\": [\"a\",\n  ]\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos);
}

TEST(ParseModel, GeneratorValidation) {
  EXPECT_NE(input_error(R"({"remark1": {"grid": [0.9]}})").find("remark1"), std::string::npos);
  EXPECT_NE(input_error(R"({"inventory": {"capacity": 4, "max_order": 2,
    "demand_pmf": [[0, 0.5]], "fixed_cost": 1, "unit_cost": 1, "holding": 0}})").find("inventory"),
            std::string::npos);
}

TEST(WriteModel, RoundTripIsBitIdentical) {
  for (const char* name : {"fix_a.json", "fix_inv.json", "fix_inv_lost_sale.json", "remark1.json",
                           "diverging.json", "two_state_average.json"}) {
    const auto d = load_model(testing::fixture_path(name));
    const auto text = write_model(d);
    const auto back = parse_model(text);
    EXPECT_TRUE(back.mdp == d.mdp) << name;
    EXPECT_EQ(back.ell, d.ell) << name;
    EXPECT_EQ(write_model(back), text) << name;
  }
}

TEST(WriteModel, RoundTripRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    ModelDocument d;
    d.mdp = testing::random_transient_mdp(seed);
    d.v = WeightFunction::ones(d.mdp.num_states());
    d.v->values.back() = 1.0 + 1.0 / 3.0;
    const auto back = parse_model(write_model(d));
    EXPECT_TRUE(back.mdp == d.mdp) << seed;
    EXPECT_EQ(back.v->values, d.v->values) << seed;
  }
}

}  // namespace
}  // namespace mdpr
