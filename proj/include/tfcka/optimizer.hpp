#ifndef TFCKA_OPTIMIZER_HPP
#define TFCKA_OPTIMIZER_HPP

#include "tfcka/finite_key.hpp"
#include "tfcka/rates.hpp"

#include <cstdint>

namespace tfcka {

/// Deterministic search effort knobs; fixed grids keep sweep outputs
/// bit-stable across runs.
struct OptimizationBudget {
    int coarse_grid_points = 48;
    int refine_iterations = 48;
    double tolerance = 1e-6;
};

/// Finite-key optimizations below this round count that find no positive key
/// are reported as infeasible rather than zero.
inline constexpr std::int64_t kFiniteKeyFloorRounds = 10'000;

/// Maximizes the asymptotic rate over q; base.vacuum_weight is ignored.
/// meta["q"] records the optimum.
RateResult optimize_q_asymptotic(const SetupParams& base, const OptimizationBudget& budget = {});

/// Maximizes the gross finite-key rate l/L over q, p_PE and the epsilon split,
/// with eps_total pinned to eps_tot_target by construction. meta records q,
/// p_pe, the four epsilons and the net rate.
RateResult optimize_finite_key(const SetupParams& base, std::int64_t total_rounds,
                               double eps_tot_target, const OptimizationBudget& budget = {});

/// Smallest L (to within 5% multiplicative precision) whose optimized
/// finite-key rate reaches fraction * asymptotic rate.
std::int64_t minimum_rounds(const SetupParams& base, double fraction, double eps_tot_target,
                            const OptimizationBudget& budget = {});

} // namespace tfcka

#endif
