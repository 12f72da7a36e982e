#include "onehop/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "onehop/oracle.hpp"

namespace onehop {

Instance build_instance(double s) {
  if (!(s >= 1.0)) throw std::domain_error("build_instance: scale factor must be at least 1");
  Instance inst;
  for (int i = 0; i < 5; ++i) inst.pools.push_back(Pool::constant_product(100.0, 100.0));
  for (int i = 0; i < 5; ++i) inst.pools.push_back(Pool::constant_product(100.0 * s, 100.0 * s));
  inst.amount_in = 100.0;
  inst.epsilon = 1e-10;
  return inst;
}

ExperimentRow run_row(double s, const InitStrategy& init) {
  ExperimentRow row;
  row.s = s;
  row.init = init;
  try {
    const Instance inst = build_instance(s);
    const PoolSpan<double> pools(inst.pools);
    const auto kappa = global_kappa(pools, inst.amount_in);
    row.kappa_exact = kappa.value;
    row.kappa = kappa.rounded();

    auto cfg = inst.config();
    const auto run_with = [&](const InitStrategy& which) {
      auto c = cfg;
      c.init = which;
      return solve(pools, inst.amount_in, c);
    };
    const InitStrategy greedy =
        init.kind == InitStrategy::Kind::marginal_greedy ? init : InitStrategy::marginal_greedy(1000);
    const auto primary = run_with(init);
    row.rounds_all_to_best = run_with(InitStrategy::all_to_best()).rounds;
    row.rounds_marginal_greedy = run_with(greedy).rounds;
    row.rounds = primary.rounds;
    row.termination = primary.termination;
    row.objective = primary.final_objective;
    row.allocation = primary.allocation;

    const auto oracle = solve_exact(pools, inst.amount_in);
    row.oracle_objective = oracle.objective;
    const double f_start = primary.trace.empty() ? primary.final_objective : primary.trace.front().objective_before;
    row.h0 = oracle.objective - f_start;
    row.h_end = oracle.objective - primary.final_objective;
    const double floor = Tolerances::rate_floor_rel * std::abs(oracle.objective);
    const double n = static_cast<double>(inst.pools.size());
    row.worst_case_rounds =
        row.h0 > floor ? 32.0 * n * kappa.value / 3.0 * std::log(row.h0 / std::max(row.h_end, floor)) : 0.0;
    row.oracle_ok = std::abs(row.objective - row.oracle_objective) <= kOracleAgreementRel * row.oracle_objective;
    if (!row.oracle_ok) row.error = "final objective disagrees with oracle";
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

std::vector<ExperimentRow> run_table1(std::span<const double> s_values, const InitStrategy& init) {
  if (s_values.empty()) throw std::invalid_argument("run_table1: no scale factors given");
  std::vector<ExperimentRow> rows;
  rows.reserve(s_values.size());
  for (const double s : s_values) rows.push_back(run_row(s, init));
  return rows;
}

void print_table(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  char line[200];
  std::snprintf(line, sizeof line, "%8s %8s %14s %12s %14s %14s %12s\n", "s", "kappa", "rounds(best)",
                "rounds(grdy)", "objective", "oracle", "h_end");
  out << line;
  for (const auto& r : rows) {
    if (r.error && r.oracle_objective == 0.0) {
      std::snprintf(line, sizeof line, "%8g  error: ", r.s);
      out << line << *r.error << '\n';
      continue;
    }
    std::snprintf(line, sizeof line, "%8g %8lld %14lld %12lld %14.9f %14.9f %12.3e%s\n", r.s, r.kappa,
                  static_cast<long long>(r.rounds_all_to_best), static_cast<long long>(r.rounds_marginal_greedy),
                  r.objective, r.oracle_objective, r.h_end, r.oracle_ok ? "" : "  ORACLE MISMATCH");
    out << line;
  }
}

void write_table_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "s,kappa,rounds_all_to_best,rounds_marginal_greedy,objective,oracle_objective,h_end\n";
  for (const auto& r : rows) {
    out << format_number(r.s) << ',' << r.kappa << ',' << r.rounds_all_to_best << ',' << r.rounds_marginal_greedy
        << ',' << format_number(r.objective) << ',' << format_number(r.oracle_objective) << ','
        << format_number(r.h_end) << '\n';
  }
}

Instance random_instance(std::uint64_t seed, const RandomInstanceOptions& opts) {
  if (opts.min_pools < 1 || opts.max_pools < opts.min_pools)
    throw std::invalid_argument("random_instance: bad pool count range");
  if (!(opts.reserve_lo > 0.0) || opts.reserve_hi < opts.reserve_lo)
    throw std::invalid_argument("random_instance: bad reserve range");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(opts.min_pools, opts.max_pools);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(opts.reserve_lo);
  const double log_span = std::log(opts.reserve_hi) - log_lo;
  auto reserve = [&] { return std::exp(log_lo + log_span * unit(rng)); };

  Instance inst;
  const int n = count(rng);
  double min_x = opts.reserve_hi;
  for (int i = 0; i < n; ++i) {
    const double x = reserve();
    const double y = reserve();
    inst.pools.push_back(Pool::constant_product(x, y));
    min_x = std::min(min_x, x);
  }
  inst.amount_in = (1.0 - unit(rng)) * min_x;
  return inst;
}

int brute_force_grid(Eigen::Index n) { return n <= 2 ? 100000 : 1000; }

bool VerifyOutcome::pass() const {
  return objective_ok && brute_force_ok && feasible_every_round && report.all_pass() &&
         result.termination != Termination::max_rounds_hit;
}

std::string VerifyOutcome::describe_failure() const {
  std::ostringstream os;
  os << "seed " << seed << " (N=" << n << "): ";
  if (result.termination == Termination::max_rounds_hit) os << "did not converge; ";
  if (!objective_ok) os << "objective off oracle by " << objective_rel_gap << " relative; ";
  if (!brute_force_ok)
    os << "oracle disagrees with grid search (objective gap " << brute_force_objective_gap << ", coordinate gap "
       << brute_force_max_coord_gap << "); ";
  if (!feasible_every_round) os << "allocation infeasible; ";
  if (const auto v = report.first_violation()) os << v->first << " violated at round " << v->second << "; ";
  return os.str();
}

VerifyOutcome verify_instance(const Instance& inst, std::uint64_t seed) {
  VerifyOutcome out;
  out.seed = seed;
  out.n = static_cast<Eigen::Index>(inst.pools.size());
  const PoolSpan<double> pools(inst.pools);
  const double x = inst.amount_in;

  out.result = solve(pools, x, inst.config());
  out.oracle = solve_exact(pools, x);
  out.report = analyze(pools, x, out.result, out.oracle);

  out.objective_rel_gap = std::abs(out.result.final_objective - out.oracle.objective) / out.oracle.objective;
  out.objective_ok = out.objective_rel_gap <= kOracleAgreementRel;

  for (const auto& a : replay_allocations(out.result))
    out.feasible_every_round = out.feasible_every_round && exactly_feasible(a);

  if (out.n <= 3) {
    out.brute_force_checked = true;
    out.grid_points = brute_force_grid(out.n);
    const auto grid = brute_force(pools, x, out.grid_points);
    double max_l = 0.0;
    for (const auto& p : inst.pools) max_l = std::max(max_l, pool_curvature_bounds(p, x).smoothness_L);
    const double step = x / out.grid_points;
    out.brute_force_objective_gap = std::abs(objective(pools, grid) - out.oracle.objective);
    out.brute_force_max_coord_gap = (grid.amounts - out.oracle.allocation.amounts).cwiseAbs().maxCoeff();
    out.brute_force_ok =
        out.brute_force_objective_gap <= x * max_l / out.grid_points + 1e-9 && out.brute_force_max_coord_gap <= 2 * step;
  }
  return out;
}

}  // namespace onehop
