#pragma once

// Runtime checks of the per-round guarantees of the transfer algorithm.
//
// With h_k = F(x*) - F(x^k) the objective gap and g_k = E'_R - E'_D the
// donor-receiver gap at the start of round k:
//   improvement  F(x^{k+1}) - F(x^k) >= 3 g_k^2 / (16 L)
//   gradient     g_k >= sqrt(mu h_k / (2N))
//   linear rate  h_k <= (1 - 3 / (32 kappa N))^k h_0
//   nesting      [E'_D, E'_R] shrinks monotonically and contains lambda*
//   feasibility  phi(x_D) < 0, so a legitimate transfer always exists

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "onehop/allocation.hpp"
#include "onehop/amm.hpp"
#include "onehop/oracle.hpp"
#include "onehop/solver.hpp"

namespace onehop {

using Trace = std::vector<RoundRecord<double>>;

// Tolerances shared by every check.
struct Tolerances {
  static constexpr double improvement_rel = 1e-12;  // times F(x*)
  static constexpr double gradient_abs = 1e-12;
  static constexpr double gradient_skip_rel = 1e-9;  // h_k below this times F(x*) is noise
  static constexpr double rate_rel = 1e-9;
  static constexpr double rate_floor_rel = 1e-12;  // times F(x*)
  static constexpr double nesting_abs = 1e-12;
  static constexpr double sandwich_abs = 1e-9;
  static constexpr double gap_floor_rel = -1e-9;
};

struct RoundCheck {
  bool applicable = true;
  bool pass = true;
  double lhs = 0.0;
  double rhs = 0.0;
  // lhs - rhs oriented so that nonnegative means the bound holds.
  double slack = 0.0;
};

using CheckSeries = std::vector<RoundCheck>;

bool all_pass(const CheckSeries& series);
std::optional<std::size_t> first_failure(const CheckSeries& series);

/// Improvement bound on every trace round. An empty trace passes vacuously.
CheckSeries check_improvement(const Trace& trace, double L, double f_star);

/// Gradient estimate on every trace round. Rounds with h_k at or below
/// 1e-9 * F(x*) are marked inapplicable, as is every round when mu == 0.
CheckSeries check_gradient_estimate(const Trace& trace, double mu, Eigen::Index n, double f_star);

struct RateCheck {
  // One entry per trace round plus the terminal state.
  CheckSeries rounds;
  bool applicable = true;
  double contraction_bound = 1.0;
  // Geometric mean of h_{k+1} / h_k over the run; informational.
  double empirical_contraction = 0.0;
};

/// Linear-rate envelope over the trace and the terminal state.
RateCheck check_linear_rate(const SolveResult<double>& result, const Kappa<double>& kappa, double f_star);

/// Price intervals [E'_D, E'_R] are nested from one state to the next,
/// including the terminal state.
CheckSeries check_nested_intervals(const SolveResult<double>& result);

/// Allocation before every round followed by the final allocation.
std::vector<Allocation<double>> replay_allocations(const SolveResult<double>& result);

/// lambda* lies in every state's interval, and every pool's marginal is
/// within g_k of lambda*. Pools that are unfunded and priced below the
/// interval are only required to sit below lambda*.
CheckSeries check_sandwich(PoolSpan<double> pools, const SolveResult<double>& result, double lambda_star);

/// phi(x_D) < 0 at the start of every round.
CheckSeries check_legitimacy_feasible(PoolSpan<double> pools, const SolveResult<double>& result);

struct BoundRow {
  std::int64_t round = 0;
  double h = 0.0;
  double g = 0.0;
  double improvement = 0.0;
  double lemma3_rhs = 0.0;
  bool lemma3_pass = true;
  double lemma4_rhs = 0.0;
  bool lemma4_applicable = true;
  bool lemma4_pass = true;
  double envelope = 0.0;
  bool rate_applicable = true;
  bool rate_pass = true;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
};

struct CheckCount {
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  double min_slack = 0.0;
  std::optional<std::int64_t> first_failure_round;
};

struct BoundReport {
  double L = 0.0;
  double mu = 0.0;
  Kappa<double> kappa;
  Eigen::Index n = 0;
  double f_star = 0.0;
  double lambda_star = 0.0;
  double oracle_tol = 0.0;
  double h0 = 0.0;
  double h_end = 0.0;
  double empirical_contraction = 0.0;
  double contraction_bound = 1.0;
  bool min_gap_ok = true;

  std::vector<BoundRow> rows;
  CheckCount improvement, gradient, rate, nesting, sandwich, feasibility;

  bool all_pass() const;
  /// Name of the first failing check and its round, or nullopt.
  std::optional<std::pair<std::string, std::int64_t>> first_violation() const;
};

/// Every check over one solve, with F(x*) and lambda* from the oracle.
BoundReport analyze(PoolSpan<double> pools, double total_x, const SolveResult<double>& result,
                    const OracleResult<double>& oracle, double oracle_tol = 1e-9);

}  // namespace onehop
