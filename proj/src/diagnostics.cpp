#include "onehop/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace onehop {

namespace {

RoundCheck bound_at_least(double lhs, double rhs, double tol) {
  RoundCheck c;
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = lhs - rhs;
  c.pass = lhs >= rhs - tol;
  return c;
}

RoundCheck not_applicable() {
  RoundCheck c;
  c.applicable = false;
  return c;
}

struct Interval {
  double lo;
  double hi;
};

std::vector<Interval> state_intervals(const SolveResult<double>& result) {
  std::vector<Interval> out;
  out.reserve(result.trace.size() + 1);
  for (const auto& r : result.trace) out.push_back({r.marginal_donor, r.marginal_receiver});
  out.push_back({result.final_marginal_donor, result.final_marginal_receiver});
  return out;
}

void tally(CheckCount& count, const CheckSeries& series) {
  count.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& c = series[k];
    if (!c.applicable) continue;
    ++count.checked;
    count.min_slack = std::min(count.min_slack, c.slack);
    if (!c.pass) {
      ++count.violations;
      if (!count.first_failure_round) count.first_failure_round = static_cast<std::int64_t>(k);
    }
  }
  if (count.checked == 0) count.min_slack = 0.0;
}

}  // namespace

bool all_pass(const CheckSeries& series) {
  return std::all_of(series.begin(), series.end(), [](const RoundCheck& c) { return !c.applicable || c.pass; });
}

std::optional<std::size_t> first_failure(const CheckSeries& series) {
  for (std::size_t k = 0; k < series.size(); ++k)
    if (series[k].applicable && !series[k].pass) return k;
  return std::nullopt;
}

CheckSeries check_improvement(const Trace& trace, double L, double f_star) {
  CheckSeries out;
  out.reserve(trace.size());
  const double tol = Tolerances::improvement_rel * std::abs(f_star);
  for (const auto& r : trace) {
    if (!(L > 0.0)) {
      out.push_back(not_applicable());
      continue;
    }
    out.push_back(bound_at_least(r.improvement, 3.0 * r.gap_g * r.gap_g / (16.0 * L), tol));
  }
  return out;
}

CheckSeries check_gradient_estimate(const Trace& trace, double mu, Eigen::Index n, double f_star) {
  CheckSeries out;
  out.reserve(trace.size());
  const double skip_below = Tolerances::gradient_skip_rel * std::abs(f_star);
  for (const auto& r : trace) {
    const double h = f_star - r.objective_before;
    if (!(mu > 0.0) || h <= skip_below) {
      out.push_back(not_applicable());
      continue;
    }
    const double rhs = std::sqrt(mu * h / (2.0 * static_cast<double>(n)));
    out.push_back(bound_at_least(r.gap_g, rhs, Tolerances::gradient_abs));
  }
  return out;
}

RateCheck check_linear_rate(const SolveResult<double>& result, const Kappa<double>& kappa, double f_star) {
  RateCheck out;
  const std::size_t states = result.trace.size() + 1;
  if (!kappa.finite()) {
    out.applicable = false;
    out.rounds.assign(states, not_applicable());
    return out;
  }

  const auto n = static_cast<double>(result.allocation.size());
  out.contraction_bound = 1.0 - 3.0 / (32.0 * kappa.value * n);

  auto gap_at = [&](std::size_t k) {
    return f_star - (k < result.trace.size() ? result.trace[k].objective_before : result.final_objective);
  };
  const double h0 = gap_at(0);
  const double floor = Tolerances::rate_floor_rel * std::abs(f_star);

  out.rounds.reserve(states);
  for (std::size_t k = 0; k < states; ++k) {
    const double envelope = std::pow(out.contraction_bound, static_cast<double>(k)) * h0;
    RoundCheck c;
    c.lhs = gap_at(k);
    c.rhs = envelope;
    c.slack = envelope - c.lhs;
    c.pass = c.lhs <= envelope * (1.0 + Tolerances::rate_rel) + floor;
    out.rounds.push_back(c);
  }

  const std::size_t rounds = result.trace.size();
  if (rounds > 0 && h0 > floor) {
    const double h_end = std::max(gap_at(rounds), floor);
    out.empirical_contraction = std::pow(h_end / h0, 1.0 / static_cast<double>(rounds));
  }
  return out;
}

CheckSeries check_nested_intervals(const SolveResult<double>& result) {
  const auto intervals = state_intervals(result);
  CheckSeries out;
  out.reserve(intervals.size());
  out.push_back(RoundCheck{});
  for (std::size_t k = 1; k < intervals.size(); ++k) {
    const auto& prev = intervals[k - 1];
    const auto& cur = intervals[k];
    RoundCheck c;
    c.lhs = cur.hi - cur.lo;
    c.rhs = prev.hi - prev.lo;
    c.slack = std::min(cur.lo - prev.lo, prev.hi - cur.hi);
    c.pass = c.slack >= -Tolerances::nesting_abs;
    out.push_back(c);
  }
  return out;
}

std::vector<Allocation<double>> replay_allocations(const SolveResult<double>& result) {
  std::vector<Allocation<double>> states;
  states.reserve(result.trace.size() + 1);
  Allocation<double> cur = result.initial;
  for (const auto& r : result.trace) {
    states.push_back(cur);
    cur.amounts[r.donor] -= r.delta;
    cur.amounts[r.receiver] += r.delta;
  }
  states.push_back(std::move(cur));
  return states;
}

CheckSeries check_sandwich(PoolSpan<double> pools, const SolveResult<double>& result, double lambda_star) {
  const auto intervals = state_intervals(result);
  const auto states = replay_allocations(result);
  const double tol = Tolerances::sandwich_abs;

  CheckSeries out;
  out.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto [lo, hi] = intervals[k];
    const double g = hi - lo;
    RoundCheck c;
    c.lhs = lambda_star;
    c.rhs = g;
    // Distance of lambda* inside the interval, then per-pool deviation.
    c.slack = std::min(lambda_star - lo, hi - lambda_star) + tol;
    for (Eigen::Index i = 0; i < states[k].size(); ++i) {
      const double m = marginal(pools[i], states[k].amounts[i]);
      const double dev = states[k].funded(i) ? std::abs(m - lambda_star) : m - lambda_star;
      c.slack = std::min(c.slack, g - dev + tol);
    }
    c.pass = c.slack >= 0.0;
    out.push_back(c);
  }
  return out;
}

CheckSeries check_legitimacy_feasible(PoolSpan<double> pools, const SolveResult<double>& result) {
  const auto states = replay_allocations(result);
  CheckSeries out;
  out.reserve(result.trace.size());
  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    const auto& r = result.trace[k];
    const auto& x = states[k].amounts;
    const PhiEvaluator<double> phi(pools[r.donor], x[r.donor], pools[r.receiver], x[r.receiver]);
    RoundCheck c;
    c.lhs = phi(x[r.donor]);
    c.rhs = 0.0;
    c.slack = -c.lhs;
    c.pass = c.lhs < 0.0;
    out.push_back(c);
  }
  return out;
}

bool BoundReport::all_pass() const {
  for (const CheckCount* c : {&improvement, &gradient, &rate, &nesting, &sandwich, &feasibility})
    if (c->violations != 0) return false;
  return min_gap_ok;
}

std::optional<std::pair<std::string, std::int64_t>> BoundReport::first_violation() const {
  const std::pair<const char*, const CheckCount*> checks[] = {
      {"improvement", &improvement}, {"gradient_estimate", &gradient}, {"linear_rate", &rate},
      {"nested_intervals", &nesting}, {"sandwich", &sandwich},         {"legitimacy_feasible", &feasibility}};
  for (const auto& [name, c] : checks)
    if (c->first_failure_round) return std::make_pair(std::string(name), *c->first_failure_round);
  if (!min_gap_ok) return std::make_pair(std::string("objective_gap_sign"), std::int64_t{0});
  return std::nullopt;
}

BoundReport analyze(PoolSpan<double> pools, double total_x, const SolveResult<double>& result,
                    const OracleResult<double>& oracle, double oracle_tol) {
  BoundReport rep;
  rep.kappa = global_kappa(pools, total_x);
  rep.L = rep.kappa.L;
  rep.mu = rep.kappa.mu;
  rep.n = static_cast<Eigen::Index>(pools.size());
  rep.f_star = oracle.objective;
  rep.lambda_star = oracle.lambda_star;
  rep.oracle_tol = oracle_tol;

  const auto& trace = result.trace;
  const auto improvement = check_improvement(trace, rep.L, rep.f_star);
  const auto gradient = check_gradient_estimate(trace, rep.mu, rep.n, rep.f_star);
  const auto rate = check_linear_rate(result, rep.kappa, rep.f_star);
  const auto nesting = check_nested_intervals(result);
  const auto sandwich = check_sandwich(pools, result, rep.lambda_star);
  const auto feasibility = check_legitimacy_feasible(pools, result);

  tally(rep.improvement, improvement);
  tally(rep.gradient, gradient);
  tally(rep.rate, rate.rounds);
  tally(rep.nesting, nesting);
  tally(rep.sandwich, sandwich);
  tally(rep.feasibility, feasibility);

  rep.h0 = rep.f_star - (trace.empty() ? result.final_objective : trace.front().objective_before);
  rep.h_end = rep.f_star - result.final_objective;
  rep.empirical_contraction = rate.empirical_contraction;
  rep.contraction_bound = rate.contraction_bound;

  const double gap_floor = Tolerances::gap_floor_rel * std::max(1.0, std::abs(rep.f_star));
  rep.min_gap_ok = rep.h_end >= gap_floor;

  rep.rows.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& r = trace[k];
    BoundRow row;
    row.round = r.round;
    row.h = rep.f_star - r.objective_before;
    row.g = r.gap_g;
    row.improvement = r.improvement;
    row.lemma3_rhs = improvement[k].rhs;
    row.lemma3_pass = !improvement[k].applicable || improvement[k].pass;
    row.lemma4_applicable = gradient[k].applicable;
    row.lemma4_rhs = gradient[k].applicable ? gradient[k].rhs : 0.0;
    row.lemma4_pass = !gradient[k].applicable || gradient[k].pass;
    row.rate_applicable = rate.applicable;
    row.envelope = rate.applicable ? rate.rounds[k].rhs : std::numeric_limits<double>::infinity();
    row.rate_pass = !rate.applicable || rate.rounds[k].pass;
    row.interval_lo = r.marginal_donor;
    row.interval_hi = r.marginal_receiver;
    rep.min_gap_ok = rep.min_gap_ok && row.h >= gap_floor;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace onehop
