#include "acstar/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "acstar/instance_io.hpp"
#include "acstar/power_model.hpp"
#include "acstar/reduction.hpp"
#include "acstar/solvers.hpp"
#include "acstar/verification.hpp"

namespace acstar::cli {

namespace {

/// Error carrying its exit code up to run().
struct CommandError {
  int code;
  std::string message;
};

std::vector<std::int64_t> parse_values(const std::string& text, const char* flag) {
  std::vector<std::int64_t> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw CommandError{kInputError, std::string(flag) + ": not an integer: \"" + item + "\""};
    }
  }
  if (values.empty()) throw CommandError{kInputError, std::string(flag) + ": empty list"};
  return values;
}

double angle_or_throw(const std::string& text, const char* flag) {
  try {
    return parse_angle(text);
  } catch (const FormatError& e) {
    throw CommandError{kInputError, std::string(flag) + ": " + e.what()};
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

struct ReductionFlags {
  std::string set;
  std::int64_t target = 0;
  double susceptance = ReductionParams{}.base_susceptance;
  double conductance = ReductionParams{}.base_conductance;
  std::string delta_max = "pi/3";

  void attach(CLI::App* cmd) {
    cmd->add_option("--set", set, "Comma-separated distinct positive integers")->required();
    cmd->add_option("--target", target, "Target sum w")->required();
    cmd->add_option("--susceptance,-b", susceptance, "Base susceptance b (<= 0)");
    cmd->add_option("--conductance,-g", conductance, "Base conductance g (>= 0)");
    cmd->add_option("--delta-max,-d", delta_max, "Angle bound in radians or as a pi fraction");
  }

  SubsetSumInstance instance() const {
    SubsetSumInstance inst{parse_values(set, "--set"), target};
    try {
      validate_instance(inst);
    } catch (const ReductionError& e) {
      throw CommandError{kInputError, e.what()};
    }
    return inst;
  }

  ReductionParams params() const {
    ReductionParams p{susceptance, conductance, angle_or_throw(delta_max, "--delta-max")};
    if (auto problem = line_params_problem(p.line())) throw CommandError{kInputError, *problem};
    if (!lemma2_condition_holds(p.base_susceptance, p.base_conductance, p.delta_max)) {
      std::ostringstream msg;
      msg << "reduction condition violated: need -b > g*tan(delta_max/2), got -b = " << fmt(0.0 - p.base_susceptance)
          << ", g*tan(delta_max/2) = " << fmt(p.base_conductance * std::tan(p.delta_max / 2));
      throw CommandError{kInputError, msg.str()};
    }
    return p;
  }
};

NetworkInstance load_instance(const std::string& path) {
  try {
    return parse_instance(read_text_file(path));
  } catch (const FormatError& e) {
    throw CommandError{kInputError, path + ": " + e.what()};
  }
}

PhaseSolution load_solution(const std::string& path) {
  try {
    return parse_solution(read_text_file(path));
  } catch (const FormatError& e) {
    throw CommandError{kInputError, path + ": " + e.what()};
  }
}

void save(const std::string& path, const std::string& text) {
  try {
    write_text_file(path, text);
  } catch (const FormatError& e) {
    throw CommandError{kInputError, e.what()};
  }
}

void print_subset(std::ostream& out, const std::vector<std::int64_t>& subset) {
  std::int64_t sum = 0;
  out << "subset:";
  for (auto v : subset) {
    out << ' ' << v;
    sum += v;
  }
  out << "\nsum: " << sum << '\n';
}

int cmd_encode(const ReductionFlags& flags, const std::string& out_path, std::ostream& out) {
  const SubsetSumInstance inst = flags.instance();
  const ReductionParams params = flags.params();
  NetworkInstance net;
  try {
    net = encode_subset_sum(inst, params);
  } catch (const ReductionError& e) {
    throw CommandError{kInputError, e.what()};
  }
  save(out_path, serialize_instance(net));

  const ExtremeFlows ext = receiving_end_extremes(params);
  const Bus& load = net.buses.front();
  out << "np_max: " << fmt(ext.np_max) << '\n'
      << "nq_max: " << fmt(ext.nq_max) << '\n'
      << "p_demand: " << fmt(load.p_demand) << '\n'
      << "q_demand: " << fmt(load.q_demand) << '\n'
      << "wrote " << out_path << " (" << net.buses.size() << " buses, " << net.lines.size() << " lines)\n";
  return kFeasible;
}

int exit_for(Verdict verdict) {
  switch (verdict) {
    case Verdict::Feasible: return kFeasible;
    case Verdict::Infeasible: return kInfeasible;
    case Verdict::Unknown: return kUnknown;
  }
  return kInputError;
}

int cmd_solve(const std::string& path, const std::string& method, int steps, double tol,
              const std::string& out_path, std::ostream& out) {
  const NetworkInstance net = load_instance(path);

  std::string chosen = method;
  if (method == "auto") {
    try {
      recognize_reduction(net);
      chosen = "dp";
      out << "method: dp (auto: reduction form recognised)\n";
    } catch (const NotReductionForm& e) {
      chosen = "grid";
      out << "method: grid (auto: " << e.what() << ")\n";
    }
  } else {
    out << "method: " << chosen << '\n';
  }

  SolveOutcome outcome;
  try {
    if (chosen == "grid") {
      outcome = grid_feasibility_search(net, {steps, tol});
    } else {
      outcome = solve_reduction_instance(net, chosen == "dp" ? SolveMethod::ReductionDP : SolveMethod::BruteForce);
    }
  } catch (const NotReductionForm& e) {
    throw CommandError{kMethodMismatch, std::string("not a reduction-form instance: ") + e.what()};
  } catch (const SolverError& e) {
    throw CommandError{kMethodMismatch, e.what()};
  } catch (const std::invalid_argument& e) {
    throw CommandError{kMethodMismatch, e.what()};
  }

  out << "verdict: " << to_string(outcome.verdict) << '\n'
      << "states explored: " << outcome.stats.states_explored << '\n'
      << "note: " << outcome.stats.runtime_note << '\n';
  if (outcome.witness && !out_path.empty()) {
    save(out_path, serialize_solution(*outcome.witness));
    out << "witness written to " << out_path << '\n';
  }
  return exit_for(outcome.verdict);
}

int cmd_check(const std::string& inst_path, const std::string& sol_path, double tol, std::ostream& out) {
  const NetworkInstance net = load_instance(inst_path);
  const PhaseSolution sol = load_solution(sol_path);
  FeasibilityReport report;
  try {
    report = check_feasibility(net, sol, tol);
  } catch (const ModelError& e) {
    throw CommandError{kInputError, e.what()};
  }

  out << std::left << std::setw(16) << "load" << std::setw(26) << "p_residual" << "q_residual" << '\n';
  for (const auto& [id, r] : report.load_residuals)
    out << std::setw(16) << id << std::setw(26) << fmt(r.p) << fmt(r.q) << '\n';
  out << std::setw(16) << "generator" << "p_injection" << '\n';
  for (const auto& [id, p] : report.generator_injections) out << std::setw(16) << id << fmt(p) << '\n';
  if (report.angle_violations.empty()) {
    out << "angle violations: none\n";
  } else {
    for (const auto& v : report.angle_violations)
      out << "angle violation: line[" << v.line_index << "] " << v.from << " -> " << v.to << " exceeds by "
          << fmt(v.excess) << '\n';
  }
  out << "max residual: " << fmt(report.max_residual()) << '\n'
      << "tolerance: " << report.tolerance_used << '\n'
      << (report.feasible ? "feasible" : "infeasible") << '\n';
  return report.feasible ? kFeasible : kInfeasible;
}

int cmd_decode(const std::string& inst_path, const std::string& sol_path, double angle_tol, std::ostream& out) {
  const NetworkInstance net = load_instance(inst_path);
  const PhaseSolution sol = load_solution(sol_path);
  try {
    print_subset(out, decode_witness(net, sol, angle_tol));
  } catch (const NotReductionForm& e) {
    throw CommandError{kMethodMismatch, std::string("not a reduction-form instance: ") + e.what()};
  } catch (const std::runtime_error& e) {
    throw CommandError{kInputError, e.what()};
  }
  return kFeasible;
}

int cmd_witness(const ReductionFlags& flags, const std::string& subset_text, const std::string& out_path,
                std::ostream& out) {
  const SubsetSumInstance inst = flags.instance();
  const ReductionParams params = flags.params();
  const auto subset = parse_values(subset_text, "--subset");
  PhaseSolution sol;
  try {
    sol = witness_from_subset(inst, params, subset);
  } catch (const ReductionError& e) {
    throw CommandError{kInputError, e.what()};
  }
  const std::string text = serialize_solution(sol);
  if (out_path.empty()) {
    out << text;
  } else {
    save(out_path, text);
    out << "wrote " << out_path << '\n';
  }
  return kFeasible;
}

void print_sweep(std::ostream& out, const SweepResult& r) {
  out << r.name << ": " << (r.samples - r.failures) << " passed, " << r.failures << " failed, worst margin "
      << fmt(r.worst_margin) << '\n';
  if (r.counterexample) out << "  counterexample " << *r.counterexample << '\n';
}

int cmd_verify_lemmas(std::int64_t samples, std::uint64_t seed, std::ostream& out) {
  if (samples < 1) throw CommandError{kInputError, "--samples must be >= 1"};
  const SweepResult lemma1 = sweep_lemma1(samples, seed);
  const SweepResult lemma2 = sweep_lemma2(samples, seed);
  print_sweep(out, lemma1);
  print_sweep(out, lemma2);
  const bool ok = lemma1.passed() && lemma2.passed();
  out << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kFeasible : kPropertyFailure;
}

int cmd_capacity(double b, double g, const std::optional<std::string>& delta_max,
                 const std::optional<double>& capacity, std::ostream& out) {
  if (delta_max.has_value() == capacity.has_value())
    throw CommandError{kInputError, "give exactly one of --delta-max or --capacity"};
  if (delta_max) {
    const LineParams params{b, g, angle_or_throw(*delta_max, "--delta-max")};
    if (auto problem = line_params_problem(params)) throw CommandError{kInputError, *problem};
    out << "capacity: " << fmt(capacity_from_delta_max(params)) << '\n';
    return kFeasible;
  }
  if (auto problem = line_params_problem({b, g, 1.0})) throw CommandError{kInputError, *problem};
  try {
    const double d = delta_max_from_capacity(b, g, *capacity);
    out << "delta_max: " << fmt(d) << '\n';
    if (*capacity > 2.0 * (b * b + g * g)) out << "capacity exceeds 2(b^2+g^2); delta_max clamped to pi/2\n";
  } catch (const ModelError& e) {
    throw CommandError{kInputError, e.what()};
  }
  return kFeasible;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AC feasibility on star networks and the subset-sum reduction", "acstar"};
  app.require_subcommand(1);

  ReductionFlags encode_flags;
  std::string encode_out;
  auto* encode = app.add_subcommand("encode", "Encode a subset-sum instance as a star network");
  encode_flags.attach(encode);
  encode->add_option("--out,-o", encode_out, "Instance file to write")->required();

  std::string solve_path, solve_method = "auto", solve_out;
  int solve_steps = GridOptions{}.angle_steps;
  double solve_tol = GridOptions{}.balance_tolerance;
  auto* solve = app.add_subcommand("solve", "Decide feasibility of an instance");
  solve->add_option("instance", solve_path)->required();
  solve->add_option("--method", solve_method)->check(CLI::IsMember({"auto", "dp", "grid", "brute"}));
  solve->add_option("--steps", solve_steps, "Grid samples per generator")->check(CLI::Range(2, 1000000));
  solve->add_option("--tol", solve_tol, "Grid balance tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--out,-o", solve_out, "Witness file to write when feasible");

  std::string check_inst, check_sol;
  double check_tol = kDefaultTolerance;
  auto* check = app.add_subcommand("check", "Check a phase-angle solution against an instance");
  check->add_option("instance", check_inst)->required();
  check->add_option("solution", check_sol)->required();
  check->add_option("--tol", check_tol)->check(CLI::PositiveNumber);

  std::string decode_inst, decode_sol;
  double decode_tol = kDefaultAngleTolerance;
  auto* decode = app.add_subcommand("decode", "Read the subset off a feasible reduction witness");
  decode->add_option("instance", decode_inst)->required();
  decode->add_option("solution", decode_sol)->required();
  decode->add_option("--angle-tol", decode_tol)->check(CLI::PositiveNumber);

  ReductionFlags witness_flags;
  std::string witness_subset, witness_out;
  auto* witness = app.add_subcommand("witness", "Build the phase angles for a subset");
  witness_flags.attach(witness);
  witness->add_option("--subset", witness_subset, "Comma-separated subset summing to the target")->required();
  witness->add_option("--out,-o", witness_out, "Solution file to write (default: stdout)");

  std::int64_t verify_samples = 100000;
  std::uint64_t verify_seed = 42;
  auto* verify = app.add_subcommand("verify-lemmas", "Seeded sweeps of both lemmas");
  verify->add_option("--samples", verify_samples);
  verify->add_option("--seed", verify_seed);

  double cap_b = 0.0, cap_g = 0.0;
  std::optional<std::string> cap_delta;
  std::optional<double> cap_value;
  auto* capacity = app.add_subcommand("capacity", "Convert between angle bound and capacity");
  capacity->add_option("--b,--susceptance", cap_b)->required();
  capacity->add_option("--g,--conductance", cap_g)->required();
  capacity->add_option("--delta-max", cap_delta);
  capacity->add_option("--capacity", cap_value);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kFeasible;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kFeasible;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*encode) return cmd_encode(encode_flags, encode_out, out);
    if (*solve) return cmd_solve(solve_path, solve_method, solve_steps, solve_tol, solve_out, out);
    if (*check) return cmd_check(check_inst, check_sol, check_tol, out);
    if (*decode) return cmd_decode(decode_inst, decode_sol, decode_tol, out);
    if (*witness) return cmd_witness(witness_flags, witness_subset, witness_out, out);
    if (*verify) return cmd_verify_lemmas(verify_samples, verify_seed, out);
    if (*capacity) return cmd_capacity(cap_b, cap_g, cap_delta, cap_value, out);
  } catch (const CommandError& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  }
  return kInputError;
}

}  // namespace acstar::cli
