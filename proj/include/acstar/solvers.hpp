#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acstar/power_model.hpp"
#include "acstar/reduction.hpp"

namespace acstar {

enum class Verdict { Feasible, Infeasible, Unknown };
enum class SolveMethod { ReductionDP, BruteForce, GridSearch };

const char* to_string(Verdict verdict);
const char* to_string(SolveMethod method);

struct SolveStats {
  std::int64_t states_explored = 0;
  std::string runtime_note;
};

struct SolveOutcome {
  Verdict verdict = Verdict::Unknown;
  std::optional<PhaseSolution> witness;
  SolveMethod method = SolveMethod::ReductionDP;
  SolveStats stats;
};

/// Pseudo-polynomial subset sum over sums 0..target. Reconstruction walks the
/// values in input order and excludes a value whenever the remaining sum is
/// still reachable without it.
std::optional<std::vector<std::int64_t>> subset_sum_dp(std::span<const std::int64_t> values,
                                                       std::int64_t target);

inline constexpr std::size_t kBruteForceMaxValues = 20;

/// Exhaustive enumeration of all 2^n subsets; throws std::invalid_argument
/// for more than kBruteForceMaxValues values.
std::optional<std::vector<std::int64_t>> subset_sum_brute(std::span<const std::int64_t> values,
                                                          std::int64_t target);

/// Exact decision for networks produced by encode_subset_sum. `method` selects
/// the subset-sum backend (ReductionDP or BruteForce). Throws NotReductionForm.
SolveOutcome solve_reduction_instance(const NetworkInstance& net,
                                      SolveMethod method = SolveMethod::ReductionDP);

struct GridOptions {
  int angle_steps = 201;
  double balance_tolerance = 1e-3;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One-sided search on a star with a single load at its centre: each
/// generator's angle difference is sampled on a grid over [-delta_max,
/// delta_max] (always containing -delta_max, 0 and delta_max) restricted to
/// non-negative generator injection, and the reachable sums of load flows are
/// accumulated on cells of side balance_tolerance. Returns Feasible with a
/// witness or Unknown, never Infeasible. Throws SolverError for other shapes.
SolveOutcome grid_feasibility_search(const NetworkInstance& net, const GridOptions& options = {});

}  // namespace acstar
