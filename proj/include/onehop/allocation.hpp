#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include <Eigen/Core>

#include "onehop/amm.hpp"

namespace onehop {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A split of total_x across N pools. Amounts are nonnegative and sum to
/// total_x.
template <typename Scalar>
struct Allocation {
  Vector<Scalar> amounts;
  Scalar total_x = Scalar(0);

  Eigen::Index size() const { return amounts.size(); }
  bool funded(Eigen::Index i) const { return amounts[i] > Scalar(0); }
};

/// Spacing of the grid every solver-produced amount lives on: the unit in
/// the last place of total_x. All amounts are integer multiples of it and
/// bounded by total_x, so every partial sum is exact and transfers conserve
/// mass bit-for-bit.
template <typename Scalar>
Scalar transfer_quantum(Scalar total_x) {
  if (!(total_x > Scalar(0)) || !std::isfinite(total_x))
    throw std::domain_error("transfer_quantum: total_x must be positive and finite");
  return std::ldexp(Scalar(1), std::ilogb(total_x) - (std::numeric_limits<Scalar>::digits - 1));
}

template <typename Scalar>
Scalar quantize_down(Scalar value, Scalar quantum) {
  if (quantum <= Scalar(0)) return value;
  return std::floor(value / quantum) * quantum;
}

/// Total output F(x) = sum_i E_i(x_i).
template <typename Scalar>
Scalar objective(PoolSpan<Scalar> pools, const Allocation<Scalar>& alloc) {
  if (static_cast<Eigen::Index>(pools.size()) != alloc.size())
    throw std::invalid_argument("objective: pool count and allocation length differ");
  Scalar f = Scalar(0);
  for (Eigen::Index i = 0; i < alloc.size(); ++i) f += swap_out(pools[i], alloc.amounts[i]);
  return f;
}

/// Nonnegativity plus exact mass conservation.
template <typename Scalar>
bool exactly_feasible(const Allocation<Scalar>& alloc) {
  if ((alloc.amounts.array() < Scalar(0)).any()) return false;
  return alloc.amounts.sum() == alloc.total_x;
}

}  // namespace onehop
