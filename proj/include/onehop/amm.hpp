#pragma once

// Trading-curve model for fee-free two-token pools.
//
// Every function here is pure and templated on the scalar type so the same
// curve math serves double-precision solving and extended-precision checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace onehop {

enum class CurveKind { constant_product, constant_sum };

template <typename Scalar>
struct PoolSpec {
  CurveKind kind = CurveKind::constant_product;
  Scalar reserve_x = Scalar(0);
  Scalar reserve_y = Scalar(0);
  // Y per X; only meaningful for constant_sum.
  Scalar rate = Scalar(0);

  static PoolSpec constant_product(Scalar x, Scalar y) {
    if (!(x > Scalar(0)) || !(y > Scalar(0)))
      throw std::domain_error("constant_product pool needs positive reserves");
    return PoolSpec{CurveKind::constant_product, x, y, Scalar(0)};
  }

  static PoolSpec constant_sum(Scalar rate, Scalar y) {
    if (!(rate > Scalar(0)) || !(y > Scalar(0)))
      throw std::domain_error("constant_sum pool needs positive rate and reserve_y");
    return PoolSpec{CurveKind::constant_sum, Scalar(0), y, rate};
  }

  bool strongly_concave() const { return kind == CurveKind::constant_product; }
};

using Pool = PoolSpec<double>;

// Non-deduced so vectors and arrays of pools convert implicitly.
template <typename Scalar>
using PoolSpan = std::type_identity_t<std::span<const PoolSpec<Scalar>>>;

template <typename Scalar>
struct CurvatureBounds {
  Scalar smoothness_L = Scalar(0);
  Scalar strong_concavity_mu = Scalar(0);
  Scalar x_cap = Scalar(0);
};

template <typename Scalar>
struct Kappa {
  Scalar L = Scalar(0);
  Scalar mu = Scalar(0);
  Scalar value = std::numeric_limits<Scalar>::infinity();

  bool finite() const { return mu > Scalar(0); }
  // Round half up, matching integer reporting of the condition number.
  long long rounded() const { return static_cast<long long>(std::floor(value + Scalar(0.5))); }
};

namespace detail {
template <typename Scalar>
void require_nonnegative(Scalar x_in, const char* what) {
  if (!(x_in >= Scalar(0))) throw std::domain_error(std::string(what) + ": negative input amount");
}
}  // namespace detail

/// Input amount at which a constant_sum pool runs out of Y. Infinite for
/// constant_product, which never fully depletes.
template <typename Scalar>
Scalar depletion_amount(const PoolSpec<Scalar>& pool) {
  if (pool.kind == CurveKind::constant_sum) return pool.reserve_y / pool.rate;
  return std::numeric_limits<Scalar>::infinity();
}

/// Y received for selling x_in of X into the pool.
template <typename Scalar>
Scalar swap_out(const PoolSpec<Scalar>& pool, Scalar x_in) {
  detail::require_nonnegative(x_in, "swap_out");
  switch (pool.kind) {
    case CurveKind::constant_product:
      return pool.reserve_y * x_in / (pool.reserve_x + x_in);
    case CurveKind::constant_sum:
      return std::min(pool.rate * x_in, pool.reserve_y);
  }
  return Scalar(0);
}

/// swap_out(a + delta) - swap_out(a), computed without cancellation.
///
/// Near convergence the per-round output gain is many orders of magnitude
/// below the output itself, so differencing two swap_out calls would return
/// rounding noise.
template <typename Scalar>
Scalar swap_gain(const PoolSpec<Scalar>& pool, Scalar a, Scalar delta) {
  detail::require_nonnegative(a, "swap_gain");
  detail::require_nonnegative(a + delta, "swap_gain");
  switch (pool.kind) {
    case CurveKind::constant_product: {
      const Scalar x = pool.reserve_x;
      return pool.reserve_y * x * delta / ((x + a) * (x + a + delta));
    }
    case CurveKind::constant_sum:
      return swap_out(pool, a + delta) - swap_out(pool, a);
  }
  return Scalar(0);
}

/// Post-trade price of X in Y, E'(x_in).
template <typename Scalar>
Scalar marginal(const PoolSpec<Scalar>& pool, Scalar x_in) {
  detail::require_nonnegative(x_in, "marginal");
  switch (pool.kind) {
    case CurveKind::constant_product: {
      const Scalar d = pool.reserve_x + x_in;
      return pool.reserve_x * pool.reserve_y / (d * d);
    }
    case CurveKind::constant_sum:
      return x_in < depletion_amount(pool) ? pool.rate : Scalar(0);
  }
  return Scalar(0);
}

/// Left derivative E'(x_in^-). Equal to marginal() except at the
/// depletion point of a constant_sum pool, where taking input back
/// still costs rate per unit.
template <typename Scalar>
Scalar marginal_below(const PoolSpec<Scalar>& pool, Scalar x_in) {
  if (pool.kind == CurveKind::constant_sum) {
    detail::require_nonnegative(x_in, "marginal_below");
    return x_in <= depletion_amount(pool) ? pool.rate : Scalar(0);
  }
  return marginal(pool, x_in);
}

/// Price of Y in X, 1/E'. A depleted constant_sum pool returns +inf.
template <typename Scalar>
Scalar price_y_in_x(const PoolSpec<Scalar>& pool, Scalar x_in) {
  const Scalar m = marginal(pool, x_in);
  if (m <= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return Scalar(1) / m;
}

/// Signed second derivative E''(x_in).
template <typename Scalar>
Scalar curvature(const PoolSpec<Scalar>& pool, Scalar x_in) {
  detail::require_nonnegative(x_in, "curvature");
  switch (pool.kind) {
    case CurveKind::constant_product: {
      const Scalar d = pool.reserve_x + x_in;
      return Scalar(-2) * pool.reserve_x * pool.reserve_y / (d * d * d);
    }
    case CurveKind::constant_sum:
      return Scalar(0);
  }
  return Scalar(0);
}

/// Extremes of -E'' over [0, x_cap]. Closed form: -E'' is monotone for both
/// supported kinds, so the extremes sit at the interval ends.
template <typename Scalar>
CurvatureBounds<Scalar> pool_curvature_bounds(const PoolSpec<Scalar>& pool, Scalar x_cap) {
  if (!(x_cap > Scalar(0))) throw std::domain_error("pool_curvature_bounds: x_cap must be positive");
  CurvatureBounds<Scalar> b;
  b.x_cap = x_cap;
  if (pool.kind == CurveKind::constant_product) {
    b.smoothness_L = -curvature(pool, Scalar(0));
    b.strong_concavity_mu = -curvature(pool, x_cap);
  }
  return b;
}

/// Liquidity heterogeneity: global max L over global min mu.
template <typename Scalar>
Kappa<Scalar> global_kappa(PoolSpan<Scalar> pools, Scalar x_cap) {
  if (pools.empty()) throw std::domain_error("global_kappa: empty pool list");
  Kappa<Scalar> k;
  k.mu = std::numeric_limits<Scalar>::infinity();
  for (const auto& p : pools) {
    const auto b = pool_curvature_bounds(p, x_cap);
    k.L = std::max(k.L, b.smoothness_L);
    k.mu = std::min(k.mu, b.strong_concavity_mu);
  }
  k.value = k.mu > Scalar(0) ? k.L / k.mu : std::numeric_limits<Scalar>::infinity();
  return k;
}

}  // namespace onehop
