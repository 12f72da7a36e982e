#pragma once

// Reference optima for the allocation problem, independent of the transfer
// algorithm.
//
// solve_exact bisects on the common marginal price lambda: at the optimum
// every funded pool has E'_i(x_i) = lambda and every unfunded pool has
// E'_i(0) <= lambda, so the allocation is sum_i (E'_i)^{-1}(lambda) = X.
// brute_force enumerates a simplex grid for N <= 3.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "onehop/allocation.hpp"
#include "onehop/amm.hpp"

namespace onehop {

template <typename Scalar>
struct InverseMarginal {
  Scalar amount = Scalar(0);
  // Constant-sum pool priced exactly at lambda: any amount in
  // [amount, max_amount] is a valid preimage.
  bool flat = false;
  Scalar max_amount = Scalar(0);
};

/// Smallest x_in >= 0 with E'(x_in) = lambda, clamped to 0 when E'(0) <= lambda.
template <typename Scalar>
InverseMarginal<Scalar> invert_marginal(const PoolSpec<Scalar>& pool, Scalar lambda) {
  if (!(lambda > Scalar(0))) throw std::domain_error("invert_marginal: lambda must be positive");
  InverseMarginal<Scalar> inv;
  switch (pool.kind) {
    case CurveKind::constant_product:
      inv.amount = std::max(Scalar(0), std::sqrt(pool.reserve_x * pool.reserve_y / lambda) - pool.reserve_x);
      inv.max_amount = inv.amount;
      break;
    case CurveKind::constant_sum:
      if (lambda > pool.rate) {
        inv.amount = inv.max_amount = Scalar(0);
      } else if (lambda < pool.rate) {
        inv.amount = inv.max_amount = depletion_amount(pool);
      } else {
        inv.flat = true;
        inv.amount = Scalar(0);
        inv.max_amount = depletion_amount(pool);
      }
      break;
  }
  return inv;
}

template <typename Scalar>
struct OracleResult {
  Allocation<Scalar> allocation;
  Scalar lambda_star = Scalar(0);
  Scalar objective = Scalar(0);
  // Residual mass was parked in constant-sum pools priced at lambda_star;
  // the optimum is a face, not a point.
  bool flat_optimum = false;
  int iterations = 0;
  // (lambda, total demand) at every bisection probe.
  std::vector<std::pair<Scalar, Scalar>> bisection_trace;
};

namespace detail {
template <typename Scalar>
std::pair<Scalar, Scalar> demand(PoolSpan<Scalar> pools, Scalar lambda) {
  Scalar lo = Scalar(0), hi = Scalar(0);
  for (const auto& p : pools) {
    const auto inv = invert_marginal(p, lambda);
    lo += inv.amount;
    hi += inv.max_amount;
  }
  return {lo, hi};
}
}  // namespace detail

template <typename Scalar>
OracleResult<Scalar> solve_exact(PoolSpan<Scalar> pools, Scalar total_x, Scalar tol = Scalar(1e-9)) {
  if (pools.empty()) throw std::domain_error("solve_exact: empty pool list");
  if (!(total_x > Scalar(0))) throw std::domain_error("solve_exact: total_x must be positive");

  constexpr int kMaxIterations = 200;
  const auto n = static_cast<Eigen::Index>(pools.size());

  Scalar hi = Scalar(0);
  Scalar lo = std::numeric_limits<Scalar>::infinity();
  for (const auto& p : pools) {
    hi = std::max(hi, marginal(p, Scalar(0)));
    lo = std::min(lo, p.kind == CurveKind::constant_sum ? p.rate : marginal(p, total_x));
  }
  lo /= Scalar(2);  // strictly below every constant-sum rate
  if (detail::demand(pools, lo).second < total_x)
    throw std::domain_error("solve_exact: pools cannot absorb total_x");

  OracleResult<Scalar> res;
  Scalar lambda = hi;
  const auto at_hi = detail::demand(pools, hi);
  res.bisection_trace.emplace_back(hi, at_hi.first);
  if (at_hi.second < total_x) {
    for (; res.iterations < kMaxIterations; ++res.iterations) {
      const Scalar mid = lo + (hi - lo) / Scalar(2);
      if (mid <= lo || mid >= hi) break;
      const auto d = detail::demand(pools, mid);
      res.bisection_trace.emplace_back(mid, d.first);
      if (d.first > total_x) {
        lo = mid;
      } else if (d.second < total_x) {
        hi = mid;
      } else {
        lo = hi = mid;
        break;
      }
    }
    const Scalar miss_lo = std::abs(detail::demand(pools, lo).first - total_x);
    const Scalar miss_hi = std::abs(detail::demand(pools, hi).first - total_x);
    lambda = miss_lo <= miss_hi ? lo : hi;
  }
  res.lambda_star = lambda;

  Allocation<Scalar> alloc{Vector<Scalar>::Zero(n), total_x};
  std::vector<Eigen::Index> flat;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto inv = invert_marginal(pools[i], lambda);
    alloc.amounts[i] = inv.amount;
    if (inv.flat) flat.push_back(i);
  }

  Scalar residual = total_x - alloc.amounts.sum();
  if (!flat.empty()) {
    // Flat pools take the residual last, each up to depletion.
    for (const Eigen::Index i : flat) {
      if (residual <= Scalar(0)) break;
      const Scalar take = std::min(residual, depletion_amount(pools[i]));
      alloc.amounts[i] += take;
      residual -= take;
    }
    res.flat_optimum = true;
  }
  if (residual != Scalar(0)) {
    if (std::abs(residual) > tol * total_x)
      throw std::runtime_error("solve_exact: bisection did not reach the requested tolerance");
    // Park the rounding residual on the flattest funded pool that can take it.
    Eigen::Index target = -1;
    Scalar flattest = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(alloc.amounts[i] > Scalar(0)) || alloc.amounts[i] + residual < Scalar(0)) continue;
      const Scalar c = -curvature(pools[i], alloc.amounts[i]);
      if (c < flattest) {
        target = i;
        flattest = c;
      }
    }
    if (target < 0) throw std::runtime_error("solve_exact: cannot place residual");
    alloc.amounts[target] += residual;
  }

  res.allocation = std::move(alloc);
  res.objective = objective(pools, res.allocation);
  return res;
}

/// Max of sum_i E_i over the grid {k * X / grid_points} on the simplex.
template <typename Scalar>
Allocation<Scalar> brute_force(PoolSpan<Scalar> pools, Scalar total_x, int grid_points) {
  if (pools.empty()) throw std::domain_error("brute_force: empty pool list");
  if (pools.size() > 3) throw std::invalid_argument("brute_force: more than 3 pools is unsupported");
  if (grid_points < 10) throw std::invalid_argument("brute_force: need at least 10 grid points");

  const auto n = static_cast<Eigen::Index>(pools.size());
  Allocation<Scalar> best{Vector<Scalar>::Zero(n), total_x};
  if (n == 1) {
    best.amounts[0] = total_x;
    return best;
  }

  const Scalar step = total_x / static_cast<Scalar>(grid_points);
  Scalar best_f = -std::numeric_limits<Scalar>::infinity();
  Vector<Scalar> x(n);
  auto consider = [&] {
    Scalar f = Scalar(0);
    for (Eigen::Index i = 0; i < n; ++i) f += swap_out(pools[i], x[i]);
    if (f > best_f) {
      best_f = f;
      best.amounts = x;
    }
  };

  for (int i = 0; i <= grid_points; ++i) {
    x[0] = step * i;
    if (n == 2) {
      x[1] = step * (grid_points - i);
      consider();
      continue;
    }
    for (int j = 0; i + j <= grid_points; ++j) {
      x[1] = step * j;
      x[2] = step * (grid_points - i - j);
      consider();
    }
  }
  return best;
}

}  // namespace onehop
