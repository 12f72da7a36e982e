#pragma once

// One-hop transfer algorithm.
//
// Each round moves input from the donor (funded pool with the highest price
// of Y, i.e. lowest marginal E') to the receiver (pool with the lowest price
// of Y, i.e. highest E'). The transfer starts at half the donor's allocation
// and is halved until it is legitimate: after the move the receiver's price
// of Y does not exceed the donor's. Rounds stop once the relative price gap
// (P_D - P_R) / P_D drops below epsilon.

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "onehop/allocation.hpp"
#include "onehop/amm.hpp"

namespace onehop {

struct InitStrategy {
  enum class Kind { all_to_best, marginal_greedy };
  Kind kind = Kind::all_to_best;
  std::int64_t chunks = 1;

  static InitStrategy all_to_best() { return {Kind::all_to_best, 1}; }
  static InitStrategy marginal_greedy(std::int64_t chunks) { return {Kind::marginal_greedy, chunks}; }

  bool operator==(const InitStrategy&) const = default;
};

template <typename Scalar>
struct SolverConfig {
  Scalar epsilon = Scalar(1e-10);
  std::int64_t max_rounds = 100000;
  int max_halvings = 200;
  InitStrategy init = InitStrategy::all_to_best();

  void validate() const {
    if (!(epsilon > Scalar(0))) throw std::invalid_argument("epsilon must be positive");
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
    if (max_halvings < 1) throw std::invalid_argument("max_halvings must be at least 1");
    if (init.kind == InitStrategy::Kind::marginal_greedy && init.chunks < 1)
      throw std::invalid_argument("marginal_greedy needs at least one chunk");
  }
};

template <typename Scalar>
struct RoundRecord {
  std::int64_t round = 0;
  Eigen::Index donor = 0;
  Eigen::Index receiver = 0;
  Scalar delta = Scalar(0);
  int halvings = 0;
  // Set when no legitimate candidate was found within max_halvings and the
  // smallest candidate was applied anyway.
  bool halving_exhausted = false;
  // Prices of Y in X and marginals E' before the transfer.
  Scalar price_donor = Scalar(0);
  Scalar price_receiver = Scalar(0);
  Scalar marginal_donor = Scalar(0);
  Scalar marginal_receiver = Scalar(0);
  Scalar objective_before = Scalar(0);
  Scalar objective_after = Scalar(0);
  // Output gained by the transfer, evaluated without cancellation.
  Scalar improvement = Scalar(0);
  // E'_R - E'_D before the transfer.
  Scalar gap_g = Scalar(0);
};

enum class Termination { converged, max_rounds_hit, degenerate_single_pool };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_rounds_hit: return "max_rounds_hit";
    case Termination::degenerate_single_pool: return "degenerate_single_pool";
  }
  return "unknown";
}

template <typename Scalar>
struct SolveResult {
  Allocation<Scalar> allocation;
  Allocation<Scalar> initial;
  std::int64_t rounds = 0;
  std::vector<RoundRecord<Scalar>> trace;
  Termination termination = Termination::converged;
  // State at exit.
  Eigen::Index final_donor = 0;
  Eigen::Index final_receiver = 0;
  Scalar final_marginal_donor = Scalar(0);
  Scalar final_marginal_receiver = Scalar(0);
  Scalar final_relative_gap = Scalar(0);
  Scalar final_objective = Scalar(0);
};

namespace detail {
template <typename Scalar>
void require_nonempty(PoolSpan<Scalar> pools, const char* what) {
  if (pools.empty()) throw std::domain_error(std::string(what) + ": empty pool list");
}

template <typename Scalar>
void require_matching(PoolSpan<Scalar> pools, const Allocation<Scalar>& alloc) {
  if (static_cast<Eigen::Index>(pools.size()) != alloc.size())
    throw std::invalid_argument("pool count and allocation length differ");
}

// Marginal seen by a pool that would receive more input: a constant_sum
// pool counts as full once less than one quantum of room is left.
template <typename Scalar>
Scalar receiving_marginal(const PoolSpec<Scalar>& pool, Scalar x, Scalar quantum) {
  if (pool.kind == CurveKind::constant_sum) {
    const Scalar room = depletion_amount(pool) - x;
    return (quantum > Scalar(0) ? room >= quantum : room > Scalar(0)) ? pool.rate : Scalar(0);
  }
  return marginal(pool, x);
}

template <typename Scalar>
Scalar grid_quantum(const Allocation<Scalar>& alloc) {
  return alloc.total_x > Scalar(0) ? transfer_quantum(alloc.total_x) : Scalar(0);
}

// Highest receiving marginal, ties to the lowest index.
template <typename Scalar>
Eigen::Index best_marginal(PoolSpan<Scalar> pools, const Vector<Scalar>& amounts, Scalar quantum) {
  Eigen::Index best = 0;
  Scalar best_m = receiving_marginal(pools[0], amounts[0], quantum);
  for (Eigen::Index i = 1; i < amounts.size(); ++i) {
    const Scalar m = receiving_marginal(pools[i], amounts[i], quantum);
    if (m > best_m) {
      best = i;
      best_m = m;
    }
  }
  return best;
}
}  // namespace detail

template <typename Scalar>
Allocation<Scalar> init_allocation(PoolSpan<Scalar> pools, Scalar total_x,
                                   const InitStrategy& strategy) {
  detail::require_nonempty<Scalar>(pools, "init_allocation");
  if (!(total_x > Scalar(0))) throw std::domain_error("init_allocation: total_x must be positive");

  const auto n = static_cast<Eigen::Index>(pools.size());
  Allocation<Scalar> alloc{Vector<Scalar>::Zero(n), total_x};

  const Scalar q = transfer_quantum(total_x);
  if (strategy.kind == InitStrategy::Kind::all_to_best) {
    alloc.amounts[detail::best_marginal(pools, alloc.amounts, q)] = total_x;
    return alloc;
  }

  if (strategy.chunks < 1) throw std::invalid_argument("marginal_greedy needs at least one chunk");
  Scalar chunk = quantize_down(total_x / static_cast<Scalar>(strategy.chunks), q);
  if (chunk <= Scalar(0)) chunk = q;

  Scalar remaining = total_x;
  for (std::int64_t c = 0; c + 1 < strategy.chunks && remaining > chunk; ++c) {
    alloc.amounts[detail::best_marginal(pools, alloc.amounts, q)] += chunk;
    remaining -= chunk;
  }
  alloc.amounts[detail::best_marginal(pools, alloc.amounts, q)] += remaining;
  return alloc;
}

/// Funded pool with the highest price of Y (lowest E', taken from below).
/// Ties to lowest index.
template <typename Scalar>
Eigen::Index select_donor(PoolSpan<Scalar> pools, const Allocation<Scalar>& alloc) {
  detail::require_matching<Scalar>(pools, alloc);
  Eigen::Index donor = -1;
  Scalar lowest = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < alloc.size(); ++i) {
    if (!alloc.funded(i)) continue;
    const Scalar m = marginal_below(pools[i], alloc.amounts[i]);
    if (donor < 0 || m < lowest) {
      donor = i;
      lowest = m;
    }
  }
  if (donor < 0) throw std::domain_error("select_donor: allocation has no funded pool");
  return donor;
}

/// Pool with the lowest price of Y (highest E'), funded or not. Ties to
/// lowest index.
template <typename Scalar>
Eigen::Index select_receiver(PoolSpan<Scalar> pools, const Allocation<Scalar>& alloc) {
  detail::require_nonempty<Scalar>(pools, "select_receiver");
  detail::require_matching<Scalar>(pools, alloc);
  return detail::best_marginal(pools, alloc.amounts, detail::grid_quantum(alloc));
}

template <typename Scalar>
Scalar donor_marginal(const PoolSpec<Scalar>& pool, const Allocation<Scalar>& alloc, Eigen::Index i) {
  return marginal_below(pool, alloc.amounts[i]);
}

template <typename Scalar>
Scalar receiver_marginal(const PoolSpec<Scalar>& pool, const Allocation<Scalar>& alloc, Eigen::Index i) {
  return detail::receiving_marginal(pool, alloc.amounts[i], detail::grid_quantum(alloc));
}

/// (P_D - P_R) / P_D, computed as (E'_R - E'_D) / E'_R. A depleted donor
/// (infinite P_D) yields 1.
template <typename Scalar>
Scalar relative_price_gap(PoolSpan<Scalar> pools, const Allocation<Scalar>& alloc) {
  const Eigen::Index d = select_donor(pools, alloc);
  const Eigen::Index r = select_receiver(pools, alloc);
  const Scalar md = donor_marginal(pools[d], alloc, d);
  const Scalar mr = receiver_marginal(pools[r], alloc, r);
  if (md <= Scalar(0)) return Scalar(1);
  if (mr <= md) return Scalar(0);
  return (mr - md) / mr;
}

/// phi(t) = E'_R(x_R + t) - E'_D(x_D - t) for t in [0, x_D]. The receiver
/// side is a left derivative so filling a constant_sum pool exactly to
/// depletion stays legitimate.
template <typename Scalar>
class PhiEvaluator {
 public:
  PhiEvaluator(const PoolSpec<Scalar>& donor, Scalar x_donor, const PoolSpec<Scalar>& receiver,
               Scalar x_receiver)
      : donor_(donor), receiver_(receiver), x_donor_(x_donor), x_receiver_(x_receiver) {}

  Scalar operator()(Scalar t) const {
    return marginal_below(receiver_, x_receiver_ + t) - marginal(donor_, std::max(x_donor_ - t, Scalar(0)));
  }

  Scalar x_donor() const { return x_donor_; }
  Scalar x_receiver() const { return x_receiver_; }

  /// Room left in the receiver before it runs out of Y.
  Scalar receiver_capacity() const { return depletion_amount(receiver_) - x_receiver_; }

 private:
  PoolSpec<Scalar> donor_;
  PoolSpec<Scalar> receiver_;
  Scalar x_donor_;
  Scalar x_receiver_;
};

template <typename Scalar>
struct HalvingResult {
  Scalar delta = Scalar(0);
  int halvings = 0;
  bool exhausted = false;
};

/// First delta in x_D/2, x_D/4, ... with phi(delta) >= 0.
///
/// Candidates are capped by the receiver's remaining capacity and, when
/// quantum > 0, rounded down onto the transfer grid. On exhaustion the
/// smallest nonzero candidate is returned with exhausted set.
template <typename Scalar>
HalvingResult<Scalar> find_legitimate_delta(const PhiEvaluator<Scalar>& phi, Scalar x_donor, int max_halvings,
                                            Scalar quantum = Scalar(0)) {
  if (!(x_donor > Scalar(0))) throw std::domain_error("find_legitimate_delta: donor is unfunded");
  if (!(phi(Scalar(0)) > Scalar(0)))
    throw std::logic_error("find_legitimate_delta: donor and receiver are not strictly ordered");

  const Scalar capacity = phi.receiver_capacity();
  Scalar raw = x_donor / Scalar(2);
  Scalar last = Scalar(0);
  int h = 0;
  for (;; ++h) {
    const Scalar candidate = quantize_down(std::min(raw, capacity), quantum);
    if (candidate <= Scalar(0)) break;
    last = candidate;
    if (phi(candidate) >= Scalar(0)) return {candidate, h, false};
    if (h == max_halvings) break;
    raw /= Scalar(2);
  }
  if (last <= Scalar(0)) last = quantum > Scalar(0) ? std::min(quantum, x_donor) : raw;
  return {last, h, true};
}

template <typename Scalar>
SolveResult<Scalar> solve(PoolSpan<Scalar> pools, Scalar total_x,
                          const SolverConfig<Scalar>& config = {}) {
  config.validate();
  detail::require_nonempty<Scalar>(pools, "solve");
  if (!(total_x > Scalar(0))) throw std::domain_error("solve: total_x must be positive");

  SolveResult<Scalar> result;
  result.initial = init_allocation(pools, total_x, config.init);
  result.allocation = result.initial;
  auto& x = result.allocation.amounts;
  Scalar f = objective(pools, result.allocation);

  auto finish = [&](Termination t) {
    result.termination = t;
    result.final_donor = select_donor(pools, result.allocation);
    result.final_receiver = select_receiver(pools, result.allocation);
    result.final_marginal_donor = donor_marginal(pools[result.final_donor], result.allocation, result.final_donor);
    result.final_marginal_receiver =
        receiver_marginal(pools[result.final_receiver], result.allocation, result.final_receiver);
    result.final_relative_gap = relative_price_gap(pools, result.allocation);
    result.final_objective = f;
    return result;
  };

  if (pools.size() == 1) return finish(Termination::degenerate_single_pool);

  const Scalar q = transfer_quantum(total_x);
  constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();
  for (std::int64_t k = 0;; ++k) {
    const Eigen::Index d = select_donor(pools, result.allocation);
    const Eigen::Index r = select_receiver(pools, result.allocation);
    if (d == r || relative_price_gap(pools, result.allocation) < config.epsilon)
      return finish(Termination::converged);
    if (k == config.max_rounds) return finish(Termination::max_rounds_hit);

    RoundRecord<Scalar> rec;
    rec.round = k;
    rec.donor = d;
    rec.receiver = r;
    rec.marginal_donor = donor_marginal(pools[d], result.allocation, d);
    rec.marginal_receiver = receiver_marginal(pools[r], result.allocation, r);
    rec.price_donor = rec.marginal_donor > Scalar(0) ? Scalar(1) / rec.marginal_donor : kInf;
    rec.price_receiver = rec.marginal_receiver > Scalar(0) ? Scalar(1) / rec.marginal_receiver : kInf;
    rec.gap_g = rec.marginal_receiver - rec.marginal_donor;

    const PhiEvaluator<Scalar> phi(pools[d], x[d], pools[r], x[r]);
    const auto step = find_legitimate_delta(phi, x[d], config.max_halvings, q);
    rec.delta = step.delta;
    rec.halvings = step.halvings;
    rec.halving_exhausted = step.exhausted;

    rec.improvement = swap_gain(pools[r], x[r], step.delta) - swap_gain(pools[d], x[d] - step.delta, step.delta);
    rec.objective_before = f;
    x[d] -= step.delta;
    x[r] += step.delta;
    f += rec.improvement;
    rec.objective_after = f;

    result.trace.push_back(rec);
    result.rounds = k + 1;
  }
}

}  // namespace onehop
