#include "acstar/solvers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace acstar {

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Feasible: return "feasible";
    case Verdict::Infeasible: return "infeasible";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

const char* to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::ReductionDP: return "dp";
    case SolveMethod::BruteForce: return "brute";
    case SolveMethod::GridSearch: return "grid";
  }
  return "?";
}

std::optional<std::vector<std::int64_t>> subset_sum_dp(std::span<const std::int64_t> values,
                                                       std::int64_t target) {
  if (target < 0) return std::nullopt;
  const std::int64_t total = std::accumulate(values.begin(), values.end(), std::int64_t{0});
  if (target > total) return std::nullopt;

  // reachable[i][s]: sum s can be formed from values[i..n).
  const std::size_t n = values.size();
  const auto width = static_cast<std::size_t>(target) + 1;
  std::vector<std::vector<char>> reachable(n + 1, std::vector<char>(width, 0));
  reachable[n][0] = 1;
  for (std::size_t i = n; i-- > 0;) {
    const auto& next = reachable[i + 1];
    auto& row = reachable[i];
    const std::int64_t v = values[i];
    for (std::size_t s = 0; s < width; ++s) {
      row[s] = next[s] || (static_cast<std::int64_t>(s) >= v && next[s - static_cast<std::size_t>(v)]);
    }
  }
  if (!reachable[0][width - 1]) return std::nullopt;

  std::vector<std::int64_t> subset;
  auto remaining = static_cast<std::size_t>(target);
  for (std::size_t i = 0; i < n && remaining > 0; ++i) {
    if (reachable[i + 1][remaining]) continue;
    subset.push_back(values[i]);
    remaining -= static_cast<std::size_t>(values[i]);
  }
  return subset;
}

std::optional<std::vector<std::int64_t>> subset_sum_brute(std::span<const std::int64_t> values,
                                                          std::int64_t target) {
  if (values.size() > kBruteForceMaxValues)
    throw std::invalid_argument("subset_sum_brute: at most " + std::to_string(kBruteForceMaxValues) +
                                " values");
  const std::uint32_t count = 1u << values.size();
  // sums[mask] extends the sum of mask without its lowest bit.
  std::vector<std::int64_t> sums(count, 0);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    if (mask != 0) sums[mask] = sums[mask & (mask - 1)] + values[static_cast<std::size_t>(std::countr_zero(mask))];
    if (sums[mask] != target) continue;
    std::vector<std::int64_t> subset;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (mask & (1u << i)) subset.push_back(values[i]);
    return subset;
  }
  return std::nullopt;
}

SolveOutcome solve_reduction_instance(const NetworkInstance& net, SolveMethod method) {
  if (method != SolveMethod::ReductionDP && method != SolveMethod::BruteForce)
    throw std::invalid_argument("solve_reduction_instance: method must be dp or brute");
  const ReductionForm form = recognize_reduction(net);
  const auto& inst = form.instance;

  SolveOutcome outcome;
  outcome.method = method;
  std::optional<std::vector<std::int64_t>> subset;
  if (method == SolveMethod::ReductionDP) {
    subset = subset_sum_dp(inst.values, inst.target);
    outcome.stats.states_explored =
        static_cast<std::int64_t>(inst.values.size() + 1) * (inst.target + 1);
  } else {
    subset = subset_sum_brute(inst.values, inst.target);
    outcome.stats.states_explored = std::int64_t{1} << inst.values.size();
  }

  std::ostringstream note;
  note << "recovered |M|=" << inst.values.size() << " w=" << inst.target;
  outcome.stats.runtime_note = note.str();

  if (!subset) {
    outcome.verdict = Verdict::Infeasible;
    return outcome;
  }
  PhaseSolution witness = witness_for_form(form, *subset);
  if (!check_feasibility(net, witness).feasible)
    throw SolverError("constructed witness failed the feasibility check");
  outcome.verdict = Verdict::Feasible;
  outcome.witness = std::move(witness);
  return outcome;
}

namespace {

struct Sample {
  double angle;   // theta_generator - theta_load
  Flow received;  // flow leaving the load towards the generator
  bool endpoint;  // angle is one of -delta_max, 0, delta_max
};

struct GridGenerator {
  std::string id;
  std::vector<Sample> samples;
};

struct GridState {
  double p;
  double q;
  std::int32_t parent;
  std::int32_t sample;
  bool exact;  // reached through endpoint samples only
};

struct CellKey {
  std::int64_t p;
  std::int64_t q;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    const auto a = static_cast<std::uint64_t>(k.p) * 0x9E3779B97F4A7C15ull;
    const auto b = static_cast<std::uint64_t>(k.q) * 0xC2B2AE3D27D4EB4Full;
    return static_cast<std::size_t>(a ^ (b >> 29) ^ (b << 17));
  }
};

constexpr std::size_t kMaxStatesPerLayer = 4'000'000;
constexpr int kFixedDirections = 32;

std::vector<Sample> sample_generator(const LineParams& params, int steps) {
  const double dmax = params.delta_max;
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k < steps; ++k) {
    double a = -dmax + 2.0 * dmax * k / (steps - 1);
    if (k == 0) a = -dmax;
    if (k == steps - 1) a = dmax;
    if (2 * k == steps - 1) a = 0.0;
    angles.push_back(a);
  }
  if (steps % 2 == 0) angles.push_back(0.0);

  std::vector<Sample> endpoints, interior;
  for (double a : angles) {
    if (line_flow(params, a).p < 0.0) continue;  // generator would absorb real power
    Sample s{a, line_flow(params, -a), a == 0.0 || std::abs(a) == dmax};
    (s.endpoint ? endpoints : interior).push_back(s);
  }
  // 0, +delta_max, -delta_max first, then interior samples in ascending order.
  std::sort(endpoints.begin(), endpoints.end(), [](const Sample& x, const Sample& y) {
    auto rank = [](double a) { return a == 0.0 ? 0 : (a > 0.0 ? 1 : 2); };
    return rank(x.angle) < rank(y.angle);
  });
  std::sort(interior.begin(), interior.end(), [](const Sample& x, const Sample& y) { return x.angle < y.angle; });
  endpoints.insert(endpoints.end(), interior.begin(), interior.end());
  return endpoints;
}

}  // namespace

SolveOutcome grid_feasibility_search(const NetworkInstance& net, const GridOptions& options) {
  if (options.angle_steps < 2) throw SolverError("angle_steps must be >= 2");
  if (!(options.balance_tolerance > 0.0)) throw SolverError("balance_tolerance must be > 0");
  if (auto violations = validate_network(net); !violations.empty())
    throw SolverError("invalid network: " + violations.front().message);

  const Bus* load = nullptr;
  for (const Bus& bus : net.buses) {
    if (bus.kind != BusKind::Load) continue;
    if (load != nullptr) throw SolverError("grid search needs exactly one load, found several");
    load = &bus;
  }
  if (load == nullptr) throw SolverError("grid search needs exactly one load, found none");

  std::vector<GridGenerator> gens;
  for (const Line& line : net.lines) {
    if (line.from != load->id && line.to != load->id)
      throw SolverError("grid search needs a star centred on the load");
    const std::string& other = line.from == load->id ? line.to : line.from;
    gens.push_back({other, sample_generator(line.params, options.angle_steps)});
  }

  const double tol = options.balance_tolerance;
  const Flow demand{load->p_demand, load->q_demand};
  const auto start = std::chrono::steady_clock::now();

  SolveOutcome outcome;
  outcome.method = SolveMethod::GridSearch;
  outcome.verdict = Verdict::Unknown;

  // Pruning directions: fixed fan plus each generator's chord normal.
  std::vector<Flow> directions;
  for (int j = 0; j < kFixedDirections; ++j) {
    const double a = 2.0 * std::numbers::pi * j / kFixedDirections;
    directions.push_back({std::cos(a), std::sin(a)});
  }
  for (const auto& gen : gens) {
    auto [lo, hi] = std::minmax_element(gen.samples.begin(), gen.samples.end(),
                                        [](const Sample& x, const Sample& y) { return x.angle < y.angle; });
    const double dp = hi->received.p - lo->received.p;
    const double dq = hi->received.q - lo->received.q;
    const double len = std::hypot(dp, dq);
    if (len > 0.0) {
      directions.push_back({-dq / len, dp / len});
      directions.push_back({dq / len, -dp / len});
    }
  }

  // Support-function bounds of the Minkowski sum of generators i..n-1.
  const std::size_t n = gens.size();
  const std::size_t nd = directions.size();
  std::vector<double> suffix_lo((n + 1) * nd, 0.0), suffix_hi((n + 1) * nd, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = 0; j < nd; ++j) {
      double lo = INFINITY, hi = -INFINITY;
      for (const Sample& s : gens[i].samples) {
        const double v = directions[j].p * s.received.p + directions[j].q * s.received.q;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      suffix_lo[i * nd + j] = suffix_lo[(i + 1) * nd + j] + lo;
      suffix_hi[i * nd + j] = suffix_hi[(i + 1) * nd + j] + hi;
    }
  }
  const double slack = std::sqrt(2.0) * tol * (1.0 + 1e-9);
  auto can_finish = [&](std::size_t layer, double p, double q) {
    const double rp = demand.p - p;
    const double rq = demand.q - q;
    for (std::size_t j = 0; j < nd; ++j) {
      const double v = directions[j].p * rp + directions[j].q * rq;
      const double fuzz = 1e-12 * (1.0 + std::abs(v));
      if (v < suffix_lo[layer * nd + j] - slack - fuzz || v > suffix_hi[layer * nd + j] + slack + fuzz)
        return false;
    }
    return true;
  };

  std::vector<std::vector<GridState>> layers(n + 1);
  if (can_finish(0, 0.0, 0.0)) layers[0].push_back({0.0, 0.0, -1, -1, true});
  std::int64_t explored = static_cast<std::int64_t>(layers[0].size());
  bool capped = false;

  for (std::size_t i = 0; i < n && !capped; ++i) {
    const auto& prev = layers[i];
    auto& next = layers[i + 1];
    const auto& samples = gens[i].samples;
    std::unordered_map<CellKey, std::int32_t, CellHash> cells;

    auto offer = [&](std::size_t si, std::size_t ki) {
      const Sample& s = samples[ki];
      const double p = prev[si].p + s.received.p;
      const double q = prev[si].q + s.received.q;
      if (!can_finish(i + 1, p, q)) return;
      const CellKey key{static_cast<std::int64_t>(std::floor(p / tol)),
                        static_cast<std::int64_t>(std::floor(q / tol))};
      if (cells.contains(key)) return;
      cells.emplace(key, static_cast<std::int32_t>(next.size()));
      next.push_back({p, q, static_cast<std::int32_t>(si), static_cast<std::int32_t>(ki),
                      prev[si].exact && s.endpoint});
    };

    for (std::size_t si = 0; si < prev.size(); ++si) {
      if (!prev[si].exact) continue;
      for (std::size_t ki = 0; ki < samples.size() && samples[ki].endpoint; ++ki) offer(si, ki);
    }
    for (std::size_t si = 0; si < prev.size() && next.size() < kMaxStatesPerLayer; ++si) {
      for (std::size_t ki = 0; ki < samples.size(); ++ki) {
        if (prev[si].exact && samples[ki].endpoint) continue;
        offer(si, ki);
      }
    }
    explored += static_cast<std::int64_t>(next.size());
    if (next.size() >= kMaxStatesPerLayer) capped = true;
  }
  outcome.stats.states_explored = explored;

  std::ostringstream note;
  const auto elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  note << n << " generators, " << options.angle_steps << " steps, tol " << tol << ", " << elapsed << " ms";
  if (capped) note << ", state cap reached";

  if (!capped) {
    std::vector<std::pair<double, std::size_t>> hits;
    const auto& last = layers[n];
    for (std::size_t k = 0; k < last.size(); ++k) {
      const double err = std::max(std::abs(last[k].p - demand.p), std::abs(last[k].q - demand.q));
      if (err <= tol) hits.emplace_back(err, k);
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [err, k] : hits) {
      PhaseSolution witness;
      witness.angles[load->id] = 0.0;
      std::int32_t idx = static_cast<std::int32_t>(k);
      for (std::size_t layer = n; layer > 0; --layer) {
        const GridState& st = layers[layer][static_cast<std::size_t>(idx)];
        witness.angles[gens[layer - 1].id] = gens[layer - 1].samples[static_cast<std::size_t>(st.sample)].angle;
        idx = st.parent;
      }
      if (!check_feasibility(net, witness, tol).feasible) continue;
      outcome.verdict = Verdict::Feasible;
      outcome.witness = std::move(witness);
      break;
    }
  }
  outcome.stats.runtime_note = note.str();
  return outcome;
}

}  // namespace acstar
