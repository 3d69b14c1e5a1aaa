#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <numeric>

#include "acstar/reduction.hpp"
#include "acstar/solvers.hpp"
#include "acstar/verification.hpp"

namespace acstar {
namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t sum_of(const std::vector<std::int64_t>& v) { return std::accumulate(v.begin(), v.end(), std::int64_t{0}); }

bool drawn_from(const std::vector<std::int64_t>& subset, const std::vector<std::int64_t>& values) {
  return std::all_of(subset.begin(), subset.end(),
                     [&](auto x) { return std::count(values.begin(), values.end(), x) == std::count(subset.begin(), subset.end(), x); });
}

TEST(SubsetSumDp, Examples) {
  const std::vector<std::int64_t> m{3, 34, 4, 12, 5, 2};
  const auto s = subset_sum_dp(m, 9);
  ASSERT_TRUE(s);
  // Excluding each value whenever possible, in input order, yields {4, 5}.
  EXPECT_EQ(*s, (std::vector<std::int64_t>{4, 5}));

  EXPECT_FALSE(subset_sum_dp(std::vector<std::int64_t>{1, 2}, 4));
  EXPECT_EQ(*subset_sum_dp(std::vector<std::int64_t>{7}, 7), (std::vector<std::int64_t>{7}));
}

TEST(SubsetSumBrute, CapAndBasics) {
  std::vector<std::int64_t> big(21);
  std::iota(big.begin(), big.end(), 1);
  EXPECT_THROW(subset_sum_brute(big, 5), std::invalid_argument);
  EXPECT_FALSE(subset_sum_brute(std::vector<std::int64_t>{1, 2}, 4));
  const auto s = subset_sum_brute(std::vector<std::int64_t>{3, 34, 4, 12, 5, 2}, 9);
  ASSERT_TRUE(s);
  EXPECT_EQ(sum_of(*s), 9);
}

TEST(SubsetSum, DpAgreesWithBruteExhaustively) {
  // All subsets of {1..15} with at most 10 elements would be slow here; sample
  // sets from {1..15} with |M| <= 10 and sweep every target.
  SplitMix64 rng(21);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<std::int64_t> values;
    const auto n = rng.integer(1, 10);
    while (static_cast<std::int64_t>(values.size()) < n) {
      const auto v = rng.integer(1, 15);
      if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
    }
    for (std::int64_t w = 1; w <= sum_of(values) + 2; ++w) {
      const auto dp = subset_sum_dp(values, w);
      const auto brute = subset_sum_brute(values, w);
      ASSERT_EQ(dp.has_value(), brute.has_value()) << "w=" << w;
      if (dp) {
        EXPECT_EQ(sum_of(*dp), w);
        EXPECT_TRUE(drawn_from(*dp, values));
      }
    }
  }
}

TEST(SolveReduction, Examples) {
  const ReductionParams params{};
  auto all = solve_reduction_instance(encode_subset_sum({{1, 2, 3}, 6}, params));
  ASSERT_EQ(all.verdict, Verdict::Feasible);
  EXPECT_EQ(all.method, SolveMethod::ReductionDP);
  EXPECT_EQ(decode_witness(encode_subset_sum({{1, 2, 3}, 6}, params), *all.witness),
            (std::vector<std::int64_t>{1, 2, 3}));

  EXPECT_EQ(solve_reduction_instance(encode_subset_sum({{2, 4}, 3}, params)).verdict, Verdict::Infeasible);
  EXPECT_FALSE(solve_reduction_instance(encode_subset_sum({{2, 4}, 3}, params)).witness);

  const NetworkInstance net = encode_subset_sum({{1, 2, 3}, 4}, params);
  const auto four = solve_reduction_instance(net);
  ASSERT_EQ(four.verdict, Verdict::Feasible);
  EXPECT_EQ(sum_of(decode_witness(net, *four.witness)), 4);

  const auto brute = solve_reduction_instance(net, SolveMethod::BruteForce);
  EXPECT_EQ(brute.verdict, Verdict::Feasible);
  EXPECT_EQ(brute.method, SolveMethod::BruteForce);
  EXPECT_THROW(solve_reduction_instance(net, SolveMethod::GridSearch), std::invalid_argument);
}

TEST(SolveReduction, RejectsGeneralNetworks) {
  NetworkInstance net;
  net.buses = {Bus::load("L", -0.7, 0.3), Bus::generator("A")};
  net.lines = {{"A", "L", {-1.0, 0.1, 1.0}}};
  EXPECT_THROW(solve_reduction_instance(net), NotReductionForm);
}

TEST(Grid, AgreesWithDpOnSmallEncodings) {
  const GridOptions options{101, 1e-3};
  const auto feasible_net = encode_subset_sum({{1, 2}, 3});
  const auto feasible = grid_feasibility_search(feasible_net, options);
  ASSERT_EQ(feasible.verdict, Verdict::Feasible);
  EXPECT_EQ(feasible.method, SolveMethod::GridSearch);
  EXPECT_TRUE(check_feasibility(feasible_net, *feasible.witness, options.balance_tolerance).feasible);
  EXPECT_EQ(decode_witness(feasible_net, *feasible.witness), (std::vector<std::int64_t>{1, 2}));

  EXPECT_EQ(grid_feasibility_search(encode_subset_sum({{1, 2}, 4}), options).verdict, Verdict::Unknown);
}

TEST(Grid, SingleGeneratorAtHalfAngle) {
  const LineParams params{-1.5, 0.4, 1.2};
  const Flow half = line_flow(params, -params.delta_max / 2);
  NetworkInstance net;
  net.buses = {Bus::load("L", half.p, half.q), Bus::generator("A")};
  net.lines = {{"L", "A", params}};  // orientation must not matter
  // An odd grid with 4k+1 points has delta_max / 2 as a sample.
  const auto outcome = grid_feasibility_search(net, {201, 1e-6});
  ASSERT_EQ(outcome.verdict, Verdict::Feasible);
  EXPECT_NEAR(outcome.witness->angles.at("A") - outcome.witness->angles.at("L"), params.delta_max / 2, 1e-12);

  // Coarse grids need not find it, but may never claim infeasibility.
  EXPECT_NE(grid_feasibility_search(net, {6, 1e-6}).verdict, Verdict::Infeasible);
}

TEST(Grid, LoadOnlyNetwork) {
  NetworkInstance net;
  net.buses = {Bus::load("L", 0.0, 0.0)};
  EXPECT_EQ(grid_feasibility_search(net).verdict, Verdict::Feasible);
  net.buses[0].p_demand = -1.0;
  EXPECT_EQ(grid_feasibility_search(net).verdict, Verdict::Unknown);
}

TEST(Grid, RejectsUnsupportedShapes) {
  NetworkInstance two_loads;
  two_loads.buses = {Bus::load("L", 0, 0), Bus::load("M", 0, 0)};
  two_loads.lines = {{"L", "M", {-1.0, 0.0, 1.0}}};
  EXPECT_THROW(grid_feasibility_search(two_loads), SolverError);

  NetworkInstance chain;
  chain.buses = {Bus::load("L", 0, 0), Bus::generator("A"), Bus::generator("B")};
  chain.lines = {{"L", "A", {-1.0, 0.0, 1.0}}, {"A", "B", {-1.0, 0.0, 1.0}}};
  EXPECT_THROW(grid_feasibility_search(chain), SolverError);

  EXPECT_THROW(grid_feasibility_search(encode_subset_sum({{1}, 1}), {1, 1e-3}), SolverError);
}

TEST(Grid, FeasibleStaysFeasibleUnderRefinement) {
  for (const auto& [values, w] : std::vector<std::pair<std::vector<std::int64_t>, std::int64_t>>{
           {{1, 2}, 3}, {{2, 3, 5}, 8}, {{1, 4, 6, 7}, 11}, {{3, 5, 8}, 3}}) {
    const auto net = encode_subset_sum({values, w});
    for (int steps : {3, 4, 11, 50, 101, 201, 400}) {
      const auto out = grid_feasibility_search(net, {steps, 1e-3});
      EXPECT_EQ(out.verdict, Verdict::Feasible) << "steps=" << steps;
    }
  }
}

TEST(Grid, GeneralStarWitnessesPassCheck) {
  // Demands built from arbitrary in-range angles on heterogeneous lines.
  SplitMix64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    NetworkInstance net;
    net.buses.push_back(Bus::load("L", 0.0, 0.0));
    const auto n = rng.integer(1, 3);
    Flow total;
    for (std::int64_t i = 0; i < n; ++i) {
      const std::string id = "G" + std::to_string(i);
      const LineParams params{-rng.uniform(0.5, 2.0), rng.uniform(0.0, 0.3), rng.uniform(0.3, 1.2)};
      // Pick a grid sample so the search can hit the demand exactly.
      const int k = static_cast<int>(rng.integer(20, 40));
      const double angle = -params.delta_max + 2.0 * params.delta_max * k / 40;
      const Flow f = line_flow(params, -angle);
      total.p += f.p;
      total.q += f.q;
      net.buses.push_back(Bus::generator(id));
      net.lines.push_back({id, "L", params});
    }
    net.buses[0].p_demand = total.p;
    net.buses[0].q_demand = total.q;
    const auto out = grid_feasibility_search(net, {41, 1e-4});
    ASSERT_EQ(out.verdict, Verdict::Feasible) << trial;
    EXPECT_TRUE(check_feasibility(net, *out.witness, 1e-4).feasible);
  }
}

}  // namespace
}  // namespace acstar
