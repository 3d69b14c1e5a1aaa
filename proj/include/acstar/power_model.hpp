#pragma once

// Steady-state AC power flow with unit voltage magnitudes.
//
// Every line carries a susceptance b <= 0, a conductance g >= 0 and a bound
// delta_max on the phase-angle difference of its endpoints. For a directed
// line with angle difference delta = theta_from - theta_to the flow leaving
// the sending bus is
//
//   p = g (1 - cos delta) - b sin delta
//   q = -b (1 - cos delta) - g sin delta
//
// Flows are always derived from angles; a PhaseSolution stores angles only.

#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acstar {

/// Absolute residual tolerance used when none is given. Each balance
/// constraint scales it by (1 + |demand|).
inline constexpr double kDefaultTolerance = 1e-9;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LineParams {
  double susceptance = 0.0;  // b, per-unit
  double conductance = 0.0;  // g, per-unit
  double delta_max = 0.0;    // radians

  friend bool operator==(const LineParams&, const LineParams&) = default;
};

/// Empty when the parameters satisfy the sign and range conventions,
/// otherwise a human-readable reason.
std::optional<std::string> line_params_problem(const LineParams& params);

enum class BusKind { Generator, Load };

struct Bus {
  std::string id;
  BusKind kind = BusKind::Load;
  double p_demand = 0.0;  // loads only
  double q_demand = 0.0;  // loads only

  static Bus generator(std::string id) { return {std::move(id), BusKind::Generator, 0.0, 0.0}; }
  static Bus load(std::string id, double p_demand, double q_demand) {
    return {std::move(id), BusKind::Load, p_demand, q_demand};
  }

  friend bool operator==(const Bus&, const Bus&) = default;
};

struct Line {
  std::string from;
  std::string to;
  LineParams params;

  friend bool operator==(const Line&, const Line&) = default;
};

struct NetworkInstance {
  std::vector<Bus> buses;
  std::vector<Line> lines;

  const Bus* find_bus(const std::string& id) const;

  friend bool operator==(const NetworkInstance&, const NetworkInstance&) = default;
};

struct PhaseSolution {
  std::map<std::string, double> angles;  // bus id -> theta (rad)

  friend bool operator==(const PhaseSolution&, const PhaseSolution&) = default;
};

struct Flow {
  double p = 0.0;
  double q = 0.0;
};

/// Real and reactive flow out of the sending bus for an angle difference
/// `delta` (sending minus receiving). The angle bound is not enforced here.
Flow line_flow(const LineParams& params, double delta);

/// p^2 + q^2 of line_flow(params, delta).
double apparent_power_squared(const LineParams& params, double delta);

/// Thermal capacity equivalent to the angle bound: 2 (g^2 + b^2)(1 - cos delta_max).
double capacity_from_delta_max(const LineParams& params);

/// Inverse of capacity_from_delta_max on (0, pi/2]; capacities above
/// 2 (b^2 + g^2) map to pi/2. Throws ModelError when b = g = 0 or the
/// capacity is negative.
double delta_max_from_capacity(double susceptance, double conductance, double capacity);

enum class ViolationKind {
  EmptyNetwork,
  DuplicateBus,
  EmptyBusId,
  GeneratorDemand,
  NonFiniteDemand,
  UnknownEndpoint,
  SelfLoop,
  DuplicateLine,
  LineParams,
  Cycle,
  Disconnected,
};

struct Violation {
  ViolationKind kind;
  std::string element;  // offending bus id or "line[i]"
  std::string message;
};

/// All invariant violations of the network; empty iff it is a valid tree.
std::vector<Violation> validate_network(const NetworkInstance& net);

struct Residual {
  double p = 0.0;
  double q = 0.0;
};

struct AngleViolation {
  std::size_t line_index = 0;
  std::string from;
  std::string to;
  double excess = 0.0;  // |delta| - delta_max
};

struct FeasibilityReport {
  bool feasible = false;
  std::map<std::string, Residual> load_residuals;
  std::map<std::string, double> generator_injections;
  std::vector<AngleViolation> angle_violations;
  double tolerance_used = kDefaultTolerance;

  /// Largest |residual| over all loads, unscaled.
  double max_residual() const;
};

/// Evaluates the load balance, generator non-negativity and angle-bound
/// constraints for `sol`. Throws ModelError for an invalid network, a
/// non-positive tolerance, or angles that do not match the bus set.
FeasibilityReport check_feasibility(const NetworkInstance& net, const PhaseSolution& sol,
                                    double tolerance = kDefaultTolerance);

}  // namespace acstar
