#include "acstar/power_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <utility>

namespace acstar {

namespace {

std::string line_name(std::size_t index) { return "line[" + std::to_string(index) + "]"; }

// Minimal union-find for the tree check.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::optional<std::string> line_params_problem(const LineParams& params) {
  const auto& [b, g, dmax] = params;
  if (!std::isfinite(b) || !std::isfinite(g) || !std::isfinite(dmax)) return "non-finite parameter";
  if (b > 0.0) return "susceptance must be <= 0, got " + std::to_string(b);
  if (g < 0.0) return "conductance must be >= 0, got " + std::to_string(g);
  if (b == 0.0 && g == 0.0) return "susceptance and conductance are both zero";
  if (!(dmax > 0.0) || dmax > std::numbers::pi / 2)
    return "delta_max must lie in (0, pi/2], got " + std::to_string(dmax);
  return std::nullopt;
}

const Bus* NetworkInstance::find_bus(const std::string& id) const {
  auto it = std::find_if(buses.begin(), buses.end(), [&](const Bus& bus) { return bus.id == id; });
  return it == buses.end() ? nullptr : &*it;
}

Flow line_flow(const LineParams& params, double delta) {
  const double one_minus_cos = 1.0 - std::cos(delta);
  const double sin_delta = std::sin(delta);
  return {params.conductance * one_minus_cos - params.susceptance * sin_delta,
          -params.susceptance * one_minus_cos - params.conductance * sin_delta};
}

double apparent_power_squared(const LineParams& params, double delta) {
  const Flow f = line_flow(params, delta);
  return f.p * f.p + f.q * f.q;
}

// 1 - cos x is evaluated as 2 sin^2(x/2) so small angles keep full precision.
double capacity_from_delta_max(const LineParams& params) {
  const double admittance_sq =
      params.conductance * params.conductance + params.susceptance * params.susceptance;
  const double half_sin = std::sin(params.delta_max / 2);
  return 4.0 * admittance_sq * half_sin * half_sin;
}

double delta_max_from_capacity(double susceptance, double conductance, double capacity) {
  const double admittance_sq = conductance * conductance + susceptance * susceptance;
  if (admittance_sq == 0.0) throw ModelError("delta_max_from_capacity: b = g = 0");
  if (!(capacity >= 0.0)) throw ModelError("delta_max_from_capacity: capacity must be >= 0");
  if (capacity > 2.0 * admittance_sq) return std::numbers::pi / 2;
  // arccos(1 - s / (2 y^2)) == 2 asin(sqrt(s / (4 y^2)))
  return 2.0 * std::asin(std::sqrt(capacity / (4.0 * admittance_sq)));
}

std::vector<Violation> validate_network(const NetworkInstance& net) {
  std::vector<Violation> out;
  if (net.buses.empty()) {
    out.push_back({ViolationKind::EmptyNetwork, "", "network has no buses"});
    return out;
  }

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const Bus& bus = net.buses[i];
    if (bus.id.empty()) out.push_back({ViolationKind::EmptyBusId, "bus[" + std::to_string(i) + "]", "empty bus id"});
    if (!index.emplace(bus.id, i).second)
      out.push_back({ViolationKind::DuplicateBus, bus.id, "bus id declared more than once"});
    if (bus.kind == BusKind::Generator && (bus.p_demand != 0.0 || bus.q_demand != 0.0))
      out.push_back({ViolationKind::GeneratorDemand, bus.id, "generator carries a demand"});
    if (!std::isfinite(bus.p_demand) || !std::isfinite(bus.q_demand))
      out.push_back({ViolationKind::NonFiniteDemand, bus.id, "non-finite demand"});
  }

  DisjointSets components(net.buses.size());
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t tree_edges = 0;
  for (std::size_t i = 0; i < net.lines.size(); ++i) {
    const Line& line = net.lines[i];
    const std::string name = line_name(i);
    if (auto problem = line_params_problem(line.params))
      out.push_back({ViolationKind::LineParams, name, *problem});

    auto a = index.find(line.from);
    auto b = index.find(line.to);
    if (a == index.end() || b == index.end()) {
      const std::string& missing = a == index.end() ? line.from : line.to;
      out.push_back({ViolationKind::UnknownEndpoint, name, "unknown endpoint '" + missing + "'"});
      continue;
    }
    if (a->second == b->second) {
      out.push_back({ViolationKind::SelfLoop, name, "line connects bus '" + line.from + "' to itself"});
      continue;
    }
    auto key = std::minmax(line.from, line.to);
    if (!seen.emplace(key.first, key.second).second) {
      out.push_back({ViolationKind::DuplicateLine, name,
                     "duplicate line between '" + line.from + "' and '" + line.to + "'"});
      continue;
    }
    if (components.unite(a->second, b->second)) {
      ++tree_edges;
    } else {
      out.push_back({ViolationKind::Cycle, name, "line closes a cycle"});
    }
  }

  if (tree_edges + 1 < index.size())
    out.push_back({ViolationKind::Disconnected, "", "line graph is not connected"});
  return out;
}

double FeasibilityReport::max_residual() const {
  double worst = 0.0;
  for (const auto& [id, r] : load_residuals) worst = std::max({worst, std::abs(r.p), std::abs(r.q)});
  return worst;
}

FeasibilityReport check_feasibility(const NetworkInstance& net, const PhaseSolution& sol,
                                    double tolerance) {
  if (!(tolerance > 0.0)) throw ModelError("tolerance must be > 0");
  if (auto violations = validate_network(net); !violations.empty())
    throw ModelError("invalid network: " + violations.front().element + ": " + violations.front().message);

  for (const Bus& bus : net.buses) {
    auto it = sol.angles.find(bus.id);
    if (it == sol.angles.end()) throw ModelError("no angle for bus '" + bus.id + "'");
    if (!std::isfinite(it->second)) throw ModelError("non-finite angle for bus '" + bus.id + "'");
  }
  if (sol.angles.size() != net.buses.size()) {
    for (const auto& [id, theta] : sol.angles)
      if (net.find_bus(id) == nullptr) throw ModelError("angle given for unknown bus '" + id + "'");
  }

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < net.buses.size(); ++i) index.emplace(net.buses[i].id, i);
  std::vector<Flow> outgoing(net.buses.size());

  FeasibilityReport report;
  report.tolerance_used = tolerance;
  for (std::size_t i = 0; i < net.lines.size(); ++i) {
    const Line& line = net.lines[i];
    const std::size_t from = index.at(line.from);
    const std::size_t to = index.at(line.to);
    const double delta = sol.angles.at(line.from) - sol.angles.at(line.to);
    const Flow forward = line_flow(line.params, delta);
    const Flow backward = line_flow(line.params, -delta);
    outgoing[from].p += forward.p;
    outgoing[from].q += forward.q;
    outgoing[to].p += backward.p;
    outgoing[to].q += backward.q;

    const double excess = std::abs(delta) - line.params.delta_max;
    if (excess > tolerance) report.angle_violations.push_back({i, line.from, line.to, excess});
  }

  bool balanced = true;
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const Bus& bus = net.buses[i];
    const Flow& f = outgoing[i];
    if (bus.kind == BusKind::Load) {
      const Residual r{f.p - bus.p_demand, f.q - bus.q_demand};
      report.load_residuals[bus.id] = r;
      balanced = balanced && std::abs(r.p) <= tolerance * (1.0 + std::abs(bus.p_demand)) &&
                 std::abs(r.q) <= tolerance * (1.0 + std::abs(bus.q_demand));
    } else {
      // Reactive output of a generator is free.
      report.generator_injections[bus.id] = f.p;
      balanced = balanced && f.p >= -tolerance;
    }
  }

  report.feasible = balanced && report.angle_violations.empty();
  return report;
}

}  // namespace acstar
