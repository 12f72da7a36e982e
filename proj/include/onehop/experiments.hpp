#pragma once

// Two-tier liquidity experiment and randomized verification batches.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onehop/diagnostics.hpp"
#include "onehop/instance_io.hpp"
#include "onehop/solver.hpp"

namespace onehop {

inline constexpr std::array<double, 8> kTable1Scales = {1, 2, 5, 10, 50, 100, 500, 1000};
inline constexpr std::array<long long, 8> kTable1Kappa = {8, 8, 9, 13, 53, 103, 503, 1003};

/// 5 pools with reserves (100, 100) and 5 with (100 s, 100 s); X = 100,
/// epsilon = 1e-10.
Instance build_instance(double s);

struct ExperimentRow {
  double s = 0.0;
  long long kappa = 0;
  double kappa_exact = 0.0;
  InitStrategy init;
  std::int64_t rounds = 0;
  Termination termination = Termination::converged;
  std::int64_t rounds_all_to_best = 0;
  std::int64_t rounds_marginal_greedy = 0;
  double objective = 0.0;
  double oracle_objective = 0.0;
  double h0 = 0.0;
  double h_end = 0.0;
  // (32 N kappa / 3) ln(h0 / h_end), with h_end floored at 1e-12 F(x*).
  double worst_case_rounds = 0.0;
  Allocation<double> allocation;
  bool oracle_ok = false;
  std::optional<std::string> error;
};

inline constexpr double kOracleAgreementRel = 1e-8;

ExperimentRow run_row(double s, const InitStrategy& init);

/// One row per s, in order. A failing row records its error and the batch
/// continues.
std::vector<ExperimentRow> run_table1(std::span<const double> s_values,
                                      const InitStrategy& init = InitStrategy::marginal_greedy(1000));

/// Text table to a stream, one line per row.
void print_table(std::ostream& out, const std::vector<ExperimentRow>& rows);
void write_table_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

struct RandomInstanceOptions {
  int min_pools = 2;
  int max_pools = 10;
  double reserve_lo = 10.0;
  double reserve_hi = 1e6;
};

/// Constant-product instance: N uniform in [min_pools, max_pools], each
/// reserve log-uniform in [reserve_lo, reserve_hi], X uniform in
/// (0, min reserve_x]. Deterministic in seed.
Instance random_instance(std::uint64_t seed, const RandomInstanceOptions& opts = {});

struct VerifyOutcome {
  std::uint64_t seed = 0;
  Eigen::Index n = 0;
  SolveResult<double> result;
  OracleResult<double> oracle;
  BoundReport report;
  double objective_rel_gap = 0.0;
  bool objective_ok = false;
  // Grid cross-check; only run for N <= 3.
  bool brute_force_checked = false;
  bool brute_force_ok = true;
  int grid_points = 0;
  double brute_force_objective_gap = 0.0;
  double brute_force_max_coord_gap = 0.0;
  bool feasible_every_round = true;

  bool pass() const;
  std::string describe_failure() const;
};

/// Grid size used for the brute-force cross-check at a given pool count.
int brute_force_grid(Eigen::Index n);

/// Solver, oracle, every diagnostic, and for N <= 3 the grid cross-check.
VerifyOutcome verify_instance(const Instance& inst, std::uint64_t seed);

}  // namespace onehop
