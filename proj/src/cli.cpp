#include "onehop/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "onehop/diagnostics.hpp"
#include "onehop/experiments.hpp"
#include "onehop/instance_io.hpp"
#include "onehop/oracle.hpp"
#include "onehop/solver.hpp"

namespace onehop::cli {

namespace {

struct SolveFlags {
  std::string instance_path;
  std::optional<double> epsilon;
  std::optional<std::int64_t> max_rounds;
  std::optional<std::string> init;
  bool with_oracle = false;
  std::string trace_path;
  std::string bounds_path;
};

struct Table1Flags {
  std::string csv_path;
  std::string init = "marginal_greedy:1000";
};

struct CheckFlags {
  std::uint64_t seed = 42;
  std::int64_t instances = 100;
  int min_pools = 2;
  int max_pools = 10;
  std::string bounds_path;
};

std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  if (path.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*f) throw InputError("cannot open " + path + " for writing");
  return f;
}

std::string num(double v) { return format_number(v); }

int cmd_solve(const SolveFlags& flags, std::ostream& out) {
  Instance inst = load_instance(flags.instance_path);
  if (flags.epsilon) {
    if (!(*flags.epsilon > 0.0)) throw InputError("--epsilon: must be positive");
    inst.epsilon = *flags.epsilon;
  }
  if (flags.max_rounds) {
    if (*flags.max_rounds < 1) throw InputError("--max-rounds: must be at least 1");
    inst.max_rounds = *flags.max_rounds;
  }
  if (flags.init) inst.init = parse_init(*flags.init);

  auto trace_file = open_output(flags.trace_path);
  auto bounds_file = open_output(flags.bounds_path);

  const PoolSpan<double> pools(inst.pools);
  const auto cfg = inst.config();
  const auto result = solve(pools, inst.amount_in, cfg);

  out << "termination: " << to_string(result.termination) << '\n';
  out << "rounds: " << result.rounds << '\n';
  out << "init: " << to_string(cfg.init) << '\n';
  out << "allocation:";
  for (Eigen::Index i = 0; i < result.allocation.size(); ++i) out << ' ' << num(result.allocation.amounts[i]);
  out << '\n';
  out << "price_donor: " << num(price_y_in_x(pools[result.final_donor], result.allocation.amounts[result.final_donor]))
      << " (pool " << result.final_donor << ")\n";
  out << "price_receiver: "
      << num(price_y_in_x(pools[result.final_receiver], result.allocation.amounts[result.final_receiver]))
      << " (pool " << result.final_receiver << ")\n";
  out << "relative_price_gap: " << num(result.final_relative_gap) << '\n';
  out << "objective: " << num(result.final_objective) << '\n';

  if (flags.with_oracle || bounds_file) {
    const auto oracle = solve_exact(pools, inst.amount_in);
    const double h_end = oracle.objective - result.final_objective;
    out << "oracle_objective: " << num(oracle.objective) << '\n';
    out << "lambda_star: " << num(oracle.lambda_star) << '\n';
    out << "h_end: " << num(h_end) << '\n';
    out << "relative_optimality_gap: " << num(h_end / oracle.objective) << '\n';
    if (bounds_file) write_bounds_csv(*bounds_file, analyze(pools, inst.amount_in, result, oracle));
  }
  if (trace_file) write_trace_csv(*trace_file, result.trace);

  return result.termination == Termination::max_rounds_hit ? kNotConverged : kOk;
}

int cmd_table1(const Table1Flags& flags, std::ostream& out, std::ostream& err) {
  const InitStrategy init = parse_init(flags.init);
  auto csv = open_output(flags.csv_path);

  const auto rows = run_table1(kTable1Scales, init);
  print_table(out, rows);
  if (csv) write_table_csv(*csv, rows);

  int status = kOk;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.error) {
      err << "row s=" << r.s << ": " << *r.error << '\n';
      status = kReproductionMismatch;
    } else if (r.kappa != kTable1Kappa[i]) {
      err << "row s=" << r.s << ": kappa " << r.kappa << " differs from expected " << kTable1Kappa[i] << '\n';
      status = kReproductionMismatch;
    }
  }
  return status;
}

struct SlackStats {
  std::int64_t checked = 0;
  double min_slack = std::numeric_limits<double>::infinity();

  void add(const CheckCount& c) {
    checked += c.checked;
    if (c.checked > 0) min_slack = std::min(min_slack, c.min_slack);
  }
};

int cmd_check(const CheckFlags& flags, std::ostream& out, std::ostream& err) {
  if (flags.instances < 1) throw InputError("--instances: must be at least 1");
  if (flags.min_pools < 1 || flags.max_pools < flags.min_pools)
    throw InputError("--min-pools/--max-pools: need 1 <= min <= max");
  auto bounds_file = open_output(flags.bounds_path);

  RandomInstanceOptions opts;
  opts.min_pools = flags.min_pools;
  opts.max_pools = flags.max_pools;

  SlackStats improvement, gradient, rate, nesting, sandwich, feasibility;
  std::int64_t rounds = 0, degenerate = 0, grid_checked = 0;
  double worst_rel_gap = 0.0;

  for (std::int64_t i = 0; i < flags.instances; ++i) {
    const std::uint64_t seed = flags.seed + static_cast<std::uint64_t>(i);
    const auto outcome = verify_instance(random_instance(seed, opts), seed);
    if (bounds_file) {
      *bounds_file << "# seed " << seed << '\n';
      write_bounds_csv(*bounds_file, outcome.report);
    }
    if (!outcome.pass()) {
      err << "property failure: " << outcome.describe_failure() << '\n';
      return kPropertyFailure;
    }
    rounds += outcome.result.rounds;
    degenerate += outcome.result.termination == Termination::degenerate_single_pool;
    grid_checked += outcome.brute_force_checked;
    worst_rel_gap = std::max(worst_rel_gap, outcome.objective_rel_gap);
    improvement.add(outcome.report.improvement);
    gradient.add(outcome.report.gradient);
    rate.add(outcome.report.rate);
    nesting.add(outcome.report.nesting);
    sandwich.add(outcome.report.sandwich);
    feasibility.add(outcome.report.feasibility);
  }

  out << "instances: " << flags.instances << " (seeds " << flags.seed << ".."
      << flags.seed + static_cast<std::uint64_t>(flags.instances - 1) << ")\n";
  out << "total rounds: " << rounds << ", single-pool instances: " << degenerate
      << ", grid cross-checks: " << grid_checked << '\n';
  out << "worst relative objective gap vs oracle: " << num(worst_rel_gap) << '\n';
  auto line = [&](const char* name, const SlackStats& s) {
    out << name << ": " << s.checked << " checks, min slack "
        << (s.checked ? num(s.min_slack) : std::string("n/a")) << '\n';
  };
  line("improvement", improvement);
  line("gradient_estimate", gradient);
  line("linear_rate", rate);
  line("nested_intervals", nesting);
  line("sandwich", sandwich);
  line("legitimacy_feasible", feasibility);
  out << "all checks passed\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"One-hop transfer routing across AMM pools", "onehop"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  auto* solve_cmd = app.add_subcommand("solve", "Route an instance file with the transfer algorithm");
  solve_cmd->add_option("instance", solve_flags.instance_path, "Instance JSON file")->required();
  solve_cmd->add_option("--epsilon", solve_flags.epsilon, "Relative price-gap tolerance");
  solve_cmd->add_option("--max-rounds", solve_flags.max_rounds, "Round cap");
  solve_cmd->add_option("--init", solve_flags.init, "all_to_best or marginal_greedy:<chunks>");
  solve_cmd->add_flag("--with-oracle", solve_flags.with_oracle, "Also report the exact optimum");
  solve_cmd->add_option("--trace", solve_flags.trace_path, "Write the per-round trace CSV");
  solve_cmd->add_option("--bounds", solve_flags.bounds_path, "Write the per-round bound report CSV");

  Table1Flags table_flags;
  auto* table_cmd = app.add_subcommand("table1", "Reproduce the two-tier liquidity experiment");
  table_cmd->add_option("--csv", table_flags.csv_path, "Write the table as CSV");
  table_cmd->add_option("--init", table_flags.init, "Initialization for the rounds column")
      ->capture_default_str();

  CheckFlags check_flags;
  auto* check_cmd = app.add_subcommand("check", "Verify every bound on seeded random instances");
  check_cmd->add_option("--seed", check_flags.seed, "Base seed; instance i uses seed + i")->capture_default_str();
  check_cmd->add_option("--instances", check_flags.instances, "Number of instances")->capture_default_str();
  check_cmd->add_option("--min-pools", check_flags.min_pools, "Smallest pool count")->capture_default_str();
  check_cmd->add_option("--max-pools", check_flags.max_pools, "Largest pool count")->capture_default_str();
  check_cmd->add_option("--bounds", check_flags.bounds_path, "Write every bound report to one CSV");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_flags, out);
    if (*table_cmd) return cmd_table1(table_flags, out, err);
    if (*check_cmd) return cmd_check(check_flags, out, err);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::domain_error& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace onehop::cli
