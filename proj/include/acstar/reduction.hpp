#pragma once

// Subset sum -> AC feasibility on a star network.
//
// Given distinct positive integers M and a target w, the encoded network has
// one generator per value x (id "g<x>"), a single load "l" at the centre and a
// line x -- l with parameters (b x, g x, delta_max). The load demands
// (w np_max, w nq_max), where (np_max, nq_max) is the flow received over a unit
// line at angle difference -delta_max. With np_max < 0 the network is feasible
// exactly when some subset of M sums to w.

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "acstar/power_model.hpp"

namespace acstar {

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a network does not have the shape produced by encode_subset_sum.
class NotReductionForm : public ReductionError {
 public:
  using ReductionError::ReductionError;
};

struct SubsetSumInstance {
  std::vector<std::int64_t> values;  // distinct, >= 1
  std::int64_t target = 0;           // >= 1

  friend bool operator==(const SubsetSumInstance&, const SubsetSumInstance&) = default;
};

/// Throws ReductionError if the instance is empty, has non-positive or repeated
/// values, or a non-positive target.
void validate_instance(const SubsetSumInstance& inst);

struct ReductionParams {
  double base_susceptance = -2.0;
  double base_conductance = 0.5;
  double delta_max = std::numbers::pi / 3;

  /// Parameters of the line attached to the generator of value `scale`.
  LineParams line(double scale = 1.0) const {
    return {base_susceptance * scale, base_conductance * scale, delta_max};
  }
};

struct ExtremeFlows {
  double np_max = 0.0;
  double nq_max = 0.0;
};

/// Flow received over a line at angle difference -delta_max.
ExtremeFlows receiving_end_extremes(const LineParams& params);
inline ExtremeFlows receiving_end_extremes(const ReductionParams& params) {
  return receiving_end_extremes(params.line());
}

/// np_max < 0, i.e. -b sin(delta_max) > g (1 - cos(delta_max)).
/// Equivalent closed form: -b > g tan(delta_max / 2).
bool lemma2_condition_holds(double susceptance, double conductance, double delta_max);

/// p_ba nq_max - q_ba np_max for the flow (p_ba, q_ba) received at angle
/// difference -delta. Never positive for delta in [0, delta_max]; zero only
/// at the two endpoints. Throws ReductionError outside that interval.
double lemma1_gap(const LineParams& params, double delta);

/// Evaluates g (1 - cos delta) - b sin delta >= 0  =>  delta >= 0.
bool lemma2_check(const LineParams& params, double delta);

/// Throws ReductionError on an invalid instance or when the parameters do not
/// satisfy the line conventions and lemma2_condition_holds.
NetworkInstance encode_subset_sum(const SubsetSumInstance& inst, const ReductionParams& params = {});

inline constexpr const char* kLoadId = "l";
std::string generator_id(std::int64_t value);

/// theta_l = 0, theta_x = delta_max for x in `subset`, 0 otherwise.
/// Throws ReductionError when `subset` is not drawn from the values (without
/// repetition) or does not sum to the target.
PhaseSolution witness_from_subset(const SubsetSumInstance& inst, const ReductionParams& params,
                                  const std::vector<std::int64_t>& subset);

/// A reduction-form network with its recovered subset-sum data.
struct ReductionForm {
  SubsetSumInstance instance;
  ReductionParams params;
  std::string load_id;
  std::vector<std::string> generator_ids;  // parallel to instance.values
};

/// Relative tolerance for recognising reduction-form parameters.
inline constexpr double kRecognitionTolerance = 1e-6;

/// Recovers (M, w, b, g, delta_max) from a star network. Throws
/// NotReductionForm when the network has a different shape, inconsistent
/// per-line ratios, or demands that are not an integer multiple of the
/// extremes.
ReductionForm recognize_reduction(const NetworkInstance& net);

/// Builds the angle assignment of `form` that sets the given values' generators
/// to delta_max. Same error contract as witness_from_subset.
PhaseSolution witness_for_form(const ReductionForm& form, const std::vector<std::int64_t>& subset);

inline constexpr double kDefaultAngleTolerance = 1e-7;

/// Reads off the subset selected by a feasible phase assignment: every
/// generator whose angle exceeds the load's by more than `angle_tolerance`.
/// Each selected generator must sit within `angle_tolerance` of delta_max and
/// the selection must sum to the target. Returns values in ascending order.
/// Throws NotReductionForm or ReductionError.
std::vector<std::int64_t> decode_witness(const NetworkInstance& net, const PhaseSolution& sol,
                                         double angle_tolerance = kDefaultAngleTolerance,
                                         double feasibility_tolerance = kDefaultTolerance);

}  // namespace acstar
