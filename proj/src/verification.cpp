#include "acstar/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "acstar/power_model.hpp"
#include "acstar/reduction.hpp"

namespace acstar {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

std::string describe(const char* label, const LineParams& params, double delta, double value) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: b=%.17g g=%.17g delta_max=%.17g delta=%.17g value=%.17g", label,
                params.susceptance, params.conductance, params.delta_max, delta, value);
  return buf;
}

// (b, g) with |(b, g)| in [r_lo, r_hi]; 10% purely reactive, 10% purely resistive.
void sample_admittance(SplitMix64& rng, double r_lo, double r_hi, LineParams& params) {
  const double r = rng.uniform(r_lo, r_hi);
  const double pick = rng.uniform();
  if (pick < 0.1) {
    params.susceptance = -r;
    params.conductance = 0.0;
  } else if (pick < 0.2) {
    params.susceptance = 0.0;
    params.conductance = r;
  } else {
    const double phi = rng.uniform(0.0, kHalfPi);
    params.susceptance = -r * std::cos(phi);
    params.conductance = r * std::sin(phi);
  }
}

// Uniform in (0, pi/2].
double sample_delta_max(SplitMix64& rng) { return (1.0 - rng.uniform()) * kHalfPi; }

void record(SweepResult& result, double margin, const std::string& detail) {
  if (result.samples == 1 || margin < result.worst_margin) result.worst_margin = margin;
  if (margin < 0.0) {
    ++result.failures;
    if (!result.counterexample) result.counterexample = detail;
  }
}

}  // namespace

SweepResult sweep_lemma1(std::int64_t samples, std::uint64_t seed) {
  constexpr double kEndpointWindow = 1e-9;
  SplitMix64 rng(seed);
  SweepResult result{"lemma1", 0, 0, 0.0, std::nullopt};
  for (std::int64_t i = 0; i < samples; ++i) {
    LineParams params;
    sample_admittance(rng, 0.2, 5.0, params);
    params.delta_max = rng.uniform(0.2, kHalfPi);
    const double pick = rng.uniform();
    double delta = pick < 0.05 ? 0.0 : pick < 0.1 ? params.delta_max : rng.uniform(0.0, params.delta_max);

    const double gap = lemma1_gap(params, delta);
    const double admittance_sq =
        params.susceptance * params.susceptance + params.conductance * params.conductance;
    const double bound = 1e-9 * (1.0 + admittance_sq);
    const bool at_endpoint = delta <= kEndpointWindow || params.delta_max - delta <= kEndpointWindow;
    const bool equality = std::abs(gap) <= bound;

    ++result.samples;
    double margin = bound - gap;
    // The equality characterisation is a yes/no check; a mismatch is a failure.
    if (at_endpoint != equality) margin = std::min(margin, -std::abs(gap));
    record(result, margin, describe("lemma1", params, delta, gap));
  }
  return result;
}

SweepResult sweep_lemma2(std::int64_t samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  SweepResult result{"lemma2", 0, 0, 0.0, std::nullopt};
  for (std::int64_t i = 0; i < samples; ++i) {
    LineParams params;
    do {
      const double r = rng.uniform(0.2, 5.0);
      const double phi = rng.uniform() < 0.1 ? 0.0 : rng.uniform(0.0, kHalfPi);
      params = {-r * std::cos(phi), r * std::sin(phi), sample_delta_max(rng)};
    } while (!lemma2_condition_holds(params.susceptance, params.conductance, params.delta_max));

    const double pick = rng.uniform();
    const double delta = pick < 0.05   ? 0.0
                         : pick < 0.075 ? params.delta_max
                         : pick < 0.1   ? -params.delta_max
                                        : rng.uniform(-params.delta_max, params.delta_max);
    ++result.samples;
    // Margin: how far the antecedent is from flipping when delta < 0.
    const double antecedent = line_flow(params, delta).p;
    const double margin = lemma2_check(params, delta) ? (delta >= 0.0 ? 1.0 : -antecedent) : -1.0;
    record(result, margin, describe("lemma2", params, delta, antecedent));
  }
  return result;
}

SweepResult sweep_apparent_power(std::int64_t samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  SweepResult result{"apparent_power", 0, 0, 0.0, std::nullopt};
  for (std::int64_t i = 0; i < samples; ++i) {
    LineParams params;
    sample_admittance(rng, 1e-3, 10.0, params);
    params.delta_max = kHalfPi;
    const double delta = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double admittance_sq =
        params.susceptance * params.susceptance + params.conductance * params.conductance;
    const double reference = 2.0 * admittance_sq * (1.0 - std::cos(delta));
    const double err = std::abs(apparent_power_squared(params, delta) - reference);
    ++result.samples;
    record(result, 1e-9 * (1.0 + admittance_sq) - err, describe("apparent_power", params, delta, err));
  }
  return result;
}

SweepResult sweep_capacity_roundtrip(std::int64_t samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  SweepResult result{"capacity_roundtrip", 0, 0, 0.0, std::nullopt};
  for (std::int64_t i = 0; i < samples; ++i) {
    LineParams params;
    sample_admittance(rng, 1e-2, 10.0, params);
    params.delta_max = sample_delta_max(rng);
    const double back =
        delta_max_from_capacity(params.susceptance, params.conductance, capacity_from_delta_max(params));
    const double err = std::abs(back - params.delta_max);
    ++result.samples;
    record(result, 1e-12 - err, describe("capacity_roundtrip", params, params.delta_max, back));
  }
  return result;
}

}  // namespace acstar
