#include "acstar/reduction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace acstar {

namespace {

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// "g<x>" with x a positive decimal integer, as written by the encoder.
std::optional<std::int64_t> value_from_id(const std::string& id) {
  if (id.size() < 2 || id[0] != 'g' || id[1] == '0') return std::nullopt;
  std::int64_t value = 0;
  const char* first = id.data() + 1;
  const char* last = id.data() + id.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || value < 1) return std::nullopt;
  return value;
}

// Integer w with demand == w * extremes, or nullopt.
std::optional<std::int64_t> demand_multiple(const Bus& load, const ExtremeFlows& unit) {
  const double ratio = load.p_demand / unit.np_max;
  if (!std::isfinite(ratio) || ratio < 0.5 || ratio > 1e15) return std::nullopt;
  const auto w = static_cast<std::int64_t>(std::llround(ratio));
  const double wd = static_cast<double>(w);
  if (!close_rel(load.p_demand, wd * unit.np_max, kRecognitionTolerance) ||
      !close_rel(load.q_demand, wd * unit.nq_max, kRecognitionTolerance))
    return std::nullopt;
  return w;
}

struct StarLine {
  const Bus* generator;
  LineParams params;
};

// Values taken from the generator ids, if all ids follow the encoder's naming
// and the per-unit line parameters agree.
std::optional<std::vector<std::int64_t>> values_from_ids(const std::vector<StarLine>& star,
                                                         ReductionParams& unit) {
  std::vector<std::int64_t> values;
  for (const auto& s : star) {
    auto v = value_from_id(s.generator->id);
    if (!v) return std::nullopt;
    values.push_back(*v);
  }
  const double x0 = static_cast<double>(values[0]);
  unit.base_susceptance = star[0].params.susceptance / x0;
  unit.base_conductance = star[0].params.conductance / x0;
  const double scale = std::abs(unit.base_susceptance) + unit.base_conductance;
  for (std::size_t i = 1; i < star.size(); ++i) {
    const double x = static_cast<double>(values[i]);
    if (std::abs(star[i].params.susceptance / x - unit.base_susceptance) > kRecognitionTolerance * scale ||
        std::abs(star[i].params.conductance / x - unit.base_conductance) > kRecognitionTolerance * scale)
      return std::nullopt;
  }
  return values;
}

// Smallest common unit that makes every line an integer multiple of it.
std::optional<std::vector<std::int64_t>> values_from_ratios(const std::vector<StarLine>& star,
                                                            const Bus& load, ReductionParams& unit) {
  constexpr int kMaxDenominator = 1000;
  const auto smallest = std::min_element(star.begin(), star.end(), [](const StarLine& a, const StarLine& b) {
    return std::abs(a.params.susceptance) < std::abs(b.params.susceptance);
  });
  for (int m = 1; m <= kMaxDenominator; ++m) {
    const double unit_b = smallest->params.susceptance / m;
    const double unit_g = smallest->params.conductance / m;
    const double scale = std::abs(unit_b) + unit_g;
    std::vector<std::int64_t> values;
    bool ok = true;
    for (const auto& s : star) {
      const double ratio = s.params.susceptance / unit_b;
      const auto x = static_cast<std::int64_t>(std::llround(ratio));
      const double xd = static_cast<double>(x);
      if (x < 1 || std::abs(ratio - xd) > kRecognitionTolerance * xd ||
          std::abs(s.params.conductance / xd - unit_g) > kRecognitionTolerance * scale) {
        ok = false;
        break;
      }
      values.push_back(x);
    }
    if (!ok) continue;
    const ReductionParams candidate{unit_b, unit_g, unit.delta_max};
    if (!lemma2_condition_holds(unit_b, unit_g, unit.delta_max)) return std::nullopt;
    if (!demand_multiple(load, receiving_end_extremes(candidate))) continue;
    unit = candidate;
    return values;
  }
  return std::nullopt;
}

}  // namespace

void validate_instance(const SubsetSumInstance& inst) {
  if (inst.values.empty()) throw ReductionError("subset-sum instance has no values");
  if (inst.target < 1) throw ReductionError("target must be >= 1");
  std::set<std::int64_t> seen;
  for (auto v : inst.values) {
    if (v < 1) throw ReductionError("values must be >= 1, got " + std::to_string(v));
    if (!seen.insert(v).second) throw ReductionError("duplicate value " + std::to_string(v));
  }
}

ExtremeFlows receiving_end_extremes(const LineParams& params) {
  const Flow f = line_flow(params, -params.delta_max);
  return {f.p, f.q};
}

bool lemma2_condition_holds(double susceptance, double conductance, double delta_max) {
  return receiving_end_extremes(LineParams{susceptance, conductance, delta_max}).np_max < 0.0;
}

double lemma1_gap(const LineParams& params, double delta) {
  if (!(delta >= 0.0 && delta <= params.delta_max))
    throw ReductionError("lemma1_gap: delta must lie in [0, delta_max]");
  const ExtremeFlows ext = receiving_end_extremes(params);
  const Flow received = line_flow(params, -delta);
  return received.p * ext.nq_max - received.q * ext.np_max;
}

bool lemma2_check(const LineParams& params, double delta) {
  const bool antecedent = line_flow(params, delta).p >= 0.0;
  return !antecedent || delta >= 0.0;
}

std::string generator_id(std::int64_t value) { return "g" + std::to_string(value); }

NetworkInstance encode_subset_sum(const SubsetSumInstance& inst, const ReductionParams& params) {
  validate_instance(inst);
  if (auto problem = line_params_problem(params.line())) throw ReductionError("reduction parameters: " + *problem);
  if (!lemma2_condition_holds(params.base_susceptance, params.base_conductance, params.delta_max))
    throw ReductionError("reduction parameters violate np_max < 0 (need -b > g tan(delta_max/2))");

  const ExtremeFlows ext = receiving_end_extremes(params);
  const double w = static_cast<double>(inst.target);

  NetworkInstance net;
  net.buses.reserve(inst.values.size() + 1);
  net.buses.push_back(Bus::load(kLoadId, w * ext.np_max, w * ext.nq_max));
  for (auto x : inst.values) {
    net.buses.push_back(Bus::generator(generator_id(x)));
    net.lines.push_back({generator_id(x), kLoadId, params.line(static_cast<double>(x))});
  }
  return net;
}

PhaseSolution witness_for_form(const ReductionForm& form, const std::vector<std::int64_t>& subset) {
  const auto& values = form.instance.values;
  std::map<std::int64_t, std::size_t> position;
  for (std::size_t i = 0; i < values.size(); ++i) position.emplace(values[i], i);

  std::vector<bool> selected(values.size(), false);
  std::int64_t sum = 0;
  for (auto x : subset) {
    auto it = position.find(x);
    if (it == position.end()) throw ReductionError("subset value " + std::to_string(x) + " is not in the set");
    if (selected[it->second]) throw ReductionError("subset repeats value " + std::to_string(x));
    selected[it->second] = true;
    sum += x;
  }
  if (sum != form.instance.target)
    throw ReductionError("subset sums to " + std::to_string(sum) + ", target is " +
                         std::to_string(form.instance.target));

  PhaseSolution sol;
  sol.angles[form.load_id] = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    sol.angles[form.generator_ids[i]] = selected[i] ? form.params.delta_max : 0.0;
  return sol;
}

PhaseSolution witness_from_subset(const SubsetSumInstance& inst, const ReductionParams& params,
                                  const std::vector<std::int64_t>& subset) {
  validate_instance(inst);
  ReductionForm form{inst, params, kLoadId, {}};
  for (auto x : inst.values) form.generator_ids.push_back(generator_id(x));
  return witness_for_form(form, subset);
}

ReductionForm recognize_reduction(const NetworkInstance& net) {
  if (auto violations = validate_network(net); !violations.empty())
    throw NotReductionForm("invalid network: " + violations.front().message);

  const Bus* load = nullptr;
  for (const Bus& bus : net.buses) {
    if (bus.kind != BusKind::Load) continue;
    if (load != nullptr) throw NotReductionForm("more than one load");
    load = &bus;
  }
  if (load == nullptr) throw NotReductionForm("no load bus");
  if (net.lines.empty()) throw NotReductionForm("no generators");

  // A tree where every line touches the single load is a star centred on it.
  std::vector<StarLine> star;
  for (const Line& line : net.lines) {
    const std::string& other = line.from == load->id ? line.to : line.from;
    if (line.from != load->id && line.to != load->id) throw NotReductionForm("line not incident to the load");
    star.push_back({net.find_bus(other), line.params});
  }

  ReductionForm form;
  form.load_id = load->id;
  form.params.delta_max = star[0].params.delta_max;
  for (const auto& s : star) {
    if (!close_rel(s.params.delta_max, form.params.delta_max, kRecognitionTolerance))
      throw NotReductionForm("lines have different delta_max");
    if (!(s.params.susceptance < 0.0)) throw NotReductionForm("line with zero susceptance");
  }

  auto values = values_from_ids(star, form.params);
  if (!values || !lemma2_condition_holds(form.params.base_susceptance, form.params.base_conductance,
                                         form.params.delta_max) ||
      !demand_multiple(*load, receiving_end_extremes(form.params)))
    values = values_from_ratios(star, *load, form.params);
  if (!values) throw NotReductionForm("line parameters and demand are not integer multiples of a common unit");

  const auto w = demand_multiple(*load, receiving_end_extremes(form.params));
  if (!w) throw NotReductionForm("demand is not an integer multiple of the receiving-end extremes");

  form.instance = {std::move(*values), *w};
  for (const auto& s : star) form.generator_ids.push_back(s.generator->id);
  try {
    validate_instance(form.instance);
  } catch (const ReductionError& e) {
    throw NotReductionForm(std::string("recovered instance is invalid: ") + e.what());
  }
  return form;
}

std::vector<std::int64_t> decode_witness(const NetworkInstance& net, const PhaseSolution& sol,
                                         double angle_tolerance, double feasibility_tolerance) {
  const ReductionForm form = recognize_reduction(net);
  const FeasibilityReport report = check_feasibility(net, sol, feasibility_tolerance);
  if (!report.feasible) throw ReductionError("phase solution is not feasible");

  const double theta_load = sol.angles.at(form.load_id);
  std::vector<std::int64_t> chosen;
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < form.generator_ids.size(); ++i) {
    const double diff = sol.angles.at(form.generator_ids[i]) - theta_load;
    if (diff <= angle_tolerance) continue;
    if (std::abs(diff - form.params.delta_max) > angle_tolerance)
      throw ReductionError("generator '" + form.generator_ids[i] + "' is selected at angle difference " +
                           std::to_string(diff) + ", not at delta_max");
    chosen.push_back(form.instance.values[i]);
    sum += form.instance.values[i];
  }
  if (sum != form.instance.target)
    throw ReductionError("decoded subset sums to " + std::to_string(sum) + ", target is " +
                         std::to_string(form.instance.target));
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace acstar
