#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "acstar/cli.hpp"
#include "acstar/instance_io.hpp"
#include "acstar/reduction.hpp"
#include "acstar/verification.hpp"

namespace acstar {
namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

TEST(InstanceFile, RoundTripsEncoderOutputsExactly) {
  SplitMix64 rng(31);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::int64_t> values;
    const auto n = rng.integer(1, 12);
    while (static_cast<std::int64_t>(values.size()) < n) {
      const auto v = rng.integer(1, 1000);
      if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
    }
    const ReductionParams params{-rng.uniform(0.5, 3.0), rng.uniform(0.0, 0.5), rng.uniform(0.1, kPi / 2)};
    const NetworkInstance net = encode_subset_sum({values, rng.integer(1, 5000)}, params);
    ASSERT_EQ(parse_instance(serialize_instance(net)), net);

    PhaseSolution sol;
    for (const auto& bus : net.buses) sol.angles[bus.id] = rng.uniform(-kPi, kPi);
    ASSERT_EQ(parse_solution(serialize_solution(sol)), sol);
  }
}

TEST(InstanceFile, Schema) {
  const std::string ok = R"({"buses": [{"id": "L", "kind": "load", "p_demand": -1, "q_demand": 0.5},
                                      {"id": "G", "kind": "generator"}],
                            "lines": [{"from": "G", "to": "L", "susceptance": -1, "conductance": 0, "delta_max": 1}]})";
  const NetworkInstance net = parse_instance(ok);
  ASSERT_EQ(net.buses.size(), 2u);
  EXPECT_EQ(net.buses[0].p_demand, -1.0);
  EXPECT_EQ(net.lines[0].params, (LineParams{-1.0, 0.0, 1.0}));

  // Loads without demand keys default to zero demand.
  EXPECT_EQ(parse_instance(R"({"buses": [{"id": "L", "kind": "load"}], "lines": []})").buses[0].q_demand, 0.0);

  const std::vector<std::string> bad = {
      R"({"buses": [], "lines": [], "extra": 1})",
      R"({"buses": [{"id": "L", "kind": "load", "pdemand": 1}], "lines": []})",
      R"({"buses": [{"id": "G", "kind": "generator", "p_demand": 1}], "lines": []})",
      R"({"buses": [{"id": "L", "kind": "slack"}], "lines": []})",
      R"({"buses": [{"id": "L", "kind": "load"}]})",
      R"({"buses": [{"id": "L", "kind": "load"}, {"id": "G", "kind": "generator"}],
          "lines": [{"from": "G", "to": "L", "susceptance": -1, "conductance": 0}]})",
      R"({"buses": [{"id": "L", "kind": "load"}, {"id": "G", "kind": "generator"}],
          "lines": [{"from": "G", "to": "L", "susceptance": "x", "conductance": 0, "delta_max": 1}]})",
      R"({"buses": [{"id": "L", "kind": "load"}, {"id": "G", "kind": "generator"}], "lines": []})",
      R"({"buses": [)",
  };
  for (const auto& text : bad) EXPECT_THROW(parse_instance(text), FormatError) << text;
}

TEST(SolutionFile, Schema) {
  EXPECT_EQ(parse_solution(R"({"angles_rad": {"a": 0.5}})").angles.at("a"), 0.5);
  EXPECT_THROW(parse_solution(R"({"angles": {"a": 0.5}})"), FormatError);
  EXPECT_THROW(parse_solution(R"({"angles_rad": {"a": "0.5"}})"), FormatError);
  EXPECT_THROW(parse_solution(R"({"angles_rad": {}, "units": "deg"})"), FormatError);
}

TEST(ParseAngle, PiShorthand) {
  EXPECT_EQ(parse_angle("pi/3"), kPi / 3);
  EXPECT_EQ(parse_angle("pi"), kPi);
  EXPECT_EQ(parse_angle("-pi/4"), -kPi / 4);
  EXPECT_DOUBLE_EQ(parse_angle("2pi/3"), 2 * kPi / 3);
  EXPECT_DOUBLE_EQ(parse_angle("2*pi/3"), 2 * kPi / 3);
  EXPECT_EQ(parse_angle("1.5707963"), 1.5707963);
  EXPECT_THROW(parse_angle("pi/0"), FormatError);
  EXPECT_THROW(parse_angle("pie"), FormatError);
  EXPECT_THROW(parse_angle("1.0rad"), FormatError);
  EXPECT_THROW(parse_angle(""), FormatError);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("acstar_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, EncodeWritesStar) {
  ASSERT_EQ(run({"encode", "--set", "1,2,3", "--target", "4", "--out", path("i.json")}), 0) << err_.str();
  const NetworkInstance net = parse_instance(read_text_file(path("i.json")));
  EXPECT_EQ(net.buses.size(), 4u);
  EXPECT_EQ(net.lines.size(), 3u);
  EXPECT_NE(out_.str().find("np_max: -1.4820508075688772"), std::string::npos);
  EXPECT_NE(out_.str().find("p_demand:"), std::string::npos);
}

TEST_F(CliTest, EncodeDefaultsEqualExplicitFlags) {
  ASSERT_EQ(run({"encode", "--set", "1,2", "--target", "3", "--out", path("a.json")}), 0);
  ASSERT_EQ(run({"encode", "--set", "1,2", "--target", "3", "--susceptance", "-2", "--conductance", "0.5",
                 "--delta-max", "pi/3", "--out", path("b.json")}),
            0)
      << err_.str();
  EXPECT_EQ(read_text_file(path("a.json")), read_text_file(path("b.json")));
}

TEST_F(CliTest, EncodeRejectsViolatedCondition) {
  EXPECT_EQ(run({"encode", "--set", "1,2", "--target", "3", "--susceptance", "0", "--conductance", "1",
                 "--out", path("x.json")}),
            cli::kInputError);
  EXPECT_NE(err_.str().find("-b > g*tan(delta_max/2)"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("x.json")));
  EXPECT_EQ(run({"encode", "--set", "2,2", "--target", "3", "--out", path("x.json")}), cli::kInputError);
  EXPECT_EQ(run({"encode", "--set", "1,a", "--target", "3", "--out", path("x.json")}), cli::kInputError);
  EXPECT_EQ(run({"encode", "--set", "1,2", "--out", path("x.json")}), cli::kInputError);
}

TEST_F(CliTest, SolveExitCodes) {
  run({"encode", "--set", "1,2,3", "--target", "4", "--out", path("yes.json")});
  EXPECT_EQ(run({"solve", path("yes.json"), "--out", path("w.json")}), cli::kFeasible);
  EXPECT_NE(out_.str().find("method: dp"), std::string::npos);
  ASSERT_TRUE(fs::exists(path("w.json")));

  run({"encode", "--set", "2,4", "--target", "3", "--out", path("no.json")});
  EXPECT_EQ(run({"solve", path("no.json")}), cli::kInfeasible);
  EXPECT_EQ(run({"solve", path("no.json"), "--method", "brute"}), cli::kInfeasible);
  EXPECT_EQ(run({"solve", path("no.json"), "--method", "grid"}), cli::kUnknown);

  EXPECT_EQ(run({"solve", path("missing.json")}), cli::kInputError);
  EXPECT_EQ(run({"solve", path("no.json"), "--method", "magic"}), cli::kInputError);
}

TEST_F(CliTest, SolveGeneralStarNeverInfeasible) {
  write_text_file(path("star.json"), R"({
    "buses": [{"id": "hub", "kind": "load", "p_demand": -0.8, "q_demand": 0.5},
              {"id": "a", "kind": "generator"}, {"id": "b", "kind": "generator"}],
    "lines": [{"from": "a", "to": "hub", "susceptance": -1.0, "conductance": 0.1, "delta_max": 1.0},
              {"from": "hub", "to": "b", "susceptance": -2.5, "conductance": 0.0, "delta_max": 0.6}]})");
  const int code = run({"solve", path("star.json")});
  EXPECT_TRUE(code == cli::kFeasible || code == cli::kUnknown) << code;
  EXPECT_NE(out_.str().find("method: grid"), std::string::npos);
  EXPECT_EQ(run({"solve", path("star.json"), "--method", "dp"}), cli::kMethodMismatch);
  const int grid = run({"solve", path("star.json"), "--method", "grid", "--steps", "51", "--tol", "1e-2"});
  EXPECT_TRUE(grid == cli::kFeasible || grid == cli::kUnknown) << grid;
}

TEST_F(CliTest, WitnessCheckDecode) {
  run({"encode", "--set", "3,5,9,14", "--target", "17", "--out", path("i.json")});
  ASSERT_EQ(run({"witness", "--set", "3,5,9,14", "--target", "17", "--subset", "3,14", "--out", path("w.json")}),
            0)
      << err_.str();
  ASSERT_EQ(run({"check", path("i.json"), path("w.json")}), cli::kFeasible);
  EXPECT_NE(out_.str().find("feasible"), std::string::npos);
  const NetworkInstance net = parse_instance(read_text_file(path("i.json")));
  const auto report = check_feasibility(net, parse_solution(read_text_file(path("w.json"))));
  EXPECT_LE(report.max_residual(), 1e-8);

  ASSERT_EQ(run({"decode", path("i.json"), path("w.json")}), cli::kFeasible);
  EXPECT_NE(out_.str().find("subset: 3 14"), std::string::npos);
  EXPECT_NE(out_.str().find("sum: 17"), std::string::npos);

  EXPECT_EQ(run({"witness", "--set", "3,5,9,14", "--target", "17", "--subset", "3,9"}), cli::kInputError);
}

TEST_F(CliTest, CheckReportsInfeasibleAndBadSolutions) {
  run({"encode", "--set", "1,2", "--target", "3", "--out", path("i.json")});
  write_text_file(path("zero.json"), R"({"angles_rad": {"l": 0, "g1": 0, "g2": 0}})");
  EXPECT_EQ(run({"check", path("i.json"), path("zero.json")}), cli::kInfeasible);
  EXPECT_EQ(run({"decode", path("i.json"), path("zero.json")}), cli::kInputError);
  write_text_file(path("short.json"), R"({"angles_rad": {"l": 0}})");
  EXPECT_EQ(run({"check", path("i.json"), path("short.json")}), cli::kInputError);
}

TEST_F(CliTest, VerifyLemmasAndCapacity) {
  EXPECT_EQ(run({"verify-lemmas", "--samples", "2000", "--seed", "7"}), 0);
  EXPECT_NE(out_.str().find("PASS"), std::string::npos);
  EXPECT_EQ(run({"verify-lemmas", "--samples", "0"}), cli::kInputError);

  ASSERT_EQ(run({"capacity", "--b", "-1", "--g", "0", "--delta-max", "1.5707963"}), 0) << err_.str();
  const double cap = std::stod(out_.str().substr(out_.str().find(':') + 1));
  EXPECT_NEAR(cap, 2.0, 1e-6);

  ASSERT_EQ(run({"capacity", "--b", "-1", "--g", "0", "--capacity", "5"}), 0);
  EXPECT_NE(out_.str().find("delta_max: 1.5707963267948966"), std::string::npos);
  EXPECT_EQ(run({"capacity", "--b", "-1", "--g", "0"}), cli::kInputError);
  EXPECT_EQ(run({"capacity", "--b", "0", "--g", "0", "--capacity", "1"}), cli::kInputError);
}

TEST_F(CliTest, ExitCodesAreDeterministic) {
  run({"encode", "--set", "4,6,9", "--target", "13", "--out", path("i.json")});
  const int first = run({"solve", path("i.json")});
  const std::string first_out = out_.str();
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(run({"solve", path("i.json")}), first);
    EXPECT_EQ(out_.str().substr(0, out_.str().find("note:")), first_out.substr(0, first_out.find("note:")));
  }
}

}  // namespace
}  // namespace acstar
