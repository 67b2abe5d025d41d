#include "tfcka/optimizer.hpp"

#include "tfcka/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tfcka {

namespace {

constexpr double kVacuumGapMin = 1e-6;  // search range of 1 - q
constexpr double kVacuumGapMax = 0.5;
constexpr double kPeProbMin = 1e-5;
constexpr double kPeProbMax = 0.5;
constexpr double kShareMin = 0.01;
constexpr double kShareMax = 0.99;

// Golden-section maximization of a unimodal-in-practice objective; the
// caller guards it with a coarse grid.
template <typename F>
double golden_max(const F& f, double lo, double hi, int iterations) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iterations; ++i) {
        if (f1 >= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? x1 : x2;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> grid(points);
    const double step = (std::log(hi) - std::log(lo)) / (points - 1);
    for (int i = 0; i < points; ++i) grid[i] = std::exp(std::log(lo) + i * step);
    return grid;
}

SetupParams with_q(const SetupParams& base, double gap) {
    SetupParams params = base;
    params.vacuum_weight = Probability(1.0 - gap);
    return params;
}

// The epsilon split parameterized so that eps_total equals the target by
// construction: s1 = share of the budget spent as 2 eps_PE, s2 = EC share of
// the remainder, s3 = x-share of eps_PE^2.
SecuritySplit make_split(double eps_tot, int num_parties, double s1, double s2, double s3) {
    const double pe = 0.5 * s1 * eps_tot;
    const double rest = eps_tot * (1.0 - s1);
    SecuritySplit split;
    split.eps_x = s3 * pe * pe / (num_parties - 1);
    split.eps_z = (1.0 - s3) * pe * pe;
    split.eps_ec = s2 * rest;
    split.eps_pa = (1.0 - s2) * rest;
    return split;
}

struct FinitePoint {
    double gap = 0.0;    // 1 - q
    double p_pe = 0.0;
    double s1 = 0.5, s2 = 0.25, s3 = 0.5;
};

double finite_gross_rate(const SetupParams& base, std::int64_t total_rounds, double eps_tot,
                         const FinitePoint& point) {
    try {
        const SetupParams params = with_q(base, point.gap);
        const ChannelStatistics stats = dark_count_adjusted(params);
        const RoundCounts counts = RoundCounts::from_expectations(
            total_rounds, point.p_pe, params.num_ports * stats.click_prob.value());
        const SecuritySplit split = make_split(eps_tot, params.num_parties,
                                               point.s1, point.s2, point.s3);
        ObservedFrequencies freqs;
        freqs.qz_m = stats.phase_error;
        freqs.qber_m_per_pair.assign(params.num_parties - 1, stats.qber);
        return key_length(freqs, counts, split, params.num_parties)
               / static_cast<double>(total_rounds);
    } catch (const infeasible_error&) {
        return 0.0;
    } catch (const no_root_error&) {
        return 0.0;
    }
}

} // namespace

RateResult optimize_q_asymptotic(const SetupParams& base, const OptimizationBudget& budget) {
    const auto rate_at = [&](double gap) { return asymptotic_rate(with_q(base, gap)).rate; };

    const std::vector<double> grid =
        log_grid(kVacuumGapMin, kVacuumGapMax, budget.coarse_grid_points);
    int best = 0;
    double best_rate = -1.0;
    std::vector<double> rates(grid.size());
    #pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(grid.size()); ++i) rates[i] = rate_at(grid[i]);
    for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
        if (rates[i] > best_rate) { best_rate = rates[i]; best = i; }
    }

    const double lo = grid[std::max(0, best - 1)];
    const double hi = grid[std::min<int>(grid.size() - 1, best + 1)];
    const double refined = std::exp(golden_max(
        [&](double x) { return rate_at(std::exp(x)); },
        std::log(lo), std::log(hi), budget.refine_iterations));

    // Refinement may only improve on the coarse grid.
    const double gap = rate_at(refined) >= best_rate ? refined : grid[best];
    RateResult result = asymptotic_rate(with_q(base, gap));
    result.meta["q"] = 1.0 - gap;
    return result;
}

RateResult optimize_finite_key(const SetupParams& base, std::int64_t total_rounds,
                               double eps_tot_target, const OptimizationBudget& budget) {
    if (!(eps_tot_target > 0.0)) {
        throw std::invalid_argument("optimize_finite_key: eps_tot target must be positive");
    }
    if (total_rounds < 1) {
        throw std::invalid_argument("optimize_finite_key: need at least one round");
    }
    const auto rate_at = [&](const FinitePoint& p) {
        return finite_gross_rate(base, total_rounds, eps_tot_target, p);
    };

    // Coarse joint scan over (1-q, p_PE) with a default split.
    const std::vector<double> gaps = log_grid(kVacuumGapMin, kVacuumGapMax, 24);
    const std::vector<double> pes = log_grid(kPeProbMin, kPeProbMax, 10);
    FinitePoint best;
    double best_rate = -1.0;
    std::vector<double> scan(gaps.size() * pes.size());
    #pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < static_cast<int>(scan.size()); ++idx) {
        FinitePoint p;
        p.gap = gaps[idx / pes.size()];
        p.p_pe = pes[idx % pes.size()];
        scan[idx] = rate_at(p);
    }
    for (int idx = 0; idx < static_cast<int>(scan.size()); ++idx) {
        if (scan[idx] > best_rate) {
            best_rate = scan[idx];
            best.gap = gaps[idx / pes.size()];
            best.p_pe = pes[idx % pes.size()];
        }
    }

    // Coordinate-wise golden refinement; log space for gap and p_PE.
    const int iters = budget.refine_iterations;
    for (int pass = 0; pass < 3; ++pass) {
        best.gap = std::exp(golden_max(
            [&](double x) { FinitePoint p = best; p.gap = std::exp(x); return rate_at(p); },
            std::log(kVacuumGapMin), std::log(kVacuumGapMax), iters));
        best.p_pe = std::exp(golden_max(
            [&](double x) { FinitePoint p = best; p.p_pe = std::exp(x); return rate_at(p); },
            std::log(kPeProbMin), std::log(kPeProbMax), iters));
        best.s1 = golden_max(
            [&](double x) { FinitePoint p = best; p.s1 = x; return rate_at(p); },
            kShareMin, kShareMax, iters);
        best.s2 = golden_max(
            [&](double x) { FinitePoint p = best; p.s2 = x; return rate_at(p); },
            kShareMin, kShareMax, iters);
        best.s3 = golden_max(
            [&](double x) { FinitePoint p = best; p.s3 = x; return rate_at(p); },
            kShareMin, kShareMax, iters);
    }

    const double rate = rate_at(best);
    if (rate <= 0.0 && total_rounds < kFiniteKeyFloorRounds) {
        throw infeasible_error("optimize_finite_key: no positive key below the round floor");
    }

    RateResult result;
    result.rate = rate;
    result.params = with_q(base, best.gap);
    const SecuritySplit split = make_split(eps_tot_target, base.num_parties,
                                           best.s1, best.s2, best.s3);
    result.meta["q"] = 1.0 - best.gap;
    result.meta["p_pe"] = best.p_pe;
    result.meta["eps_x"] = split.eps_x;
    result.meta["eps_z"] = split.eps_z;
    result.meta["eps_ec"] = split.eps_ec;
    result.meta["eps_pa"] = split.eps_pa;
    result.meta["net_rate"] =
        net_key_length(rate * total_rounds, total_rounds, best.p_pe) / total_rounds;
    return result;
}

std::int64_t minimum_rounds(const SetupParams& base, double fraction, double eps_tot_target,
                            const OptimizationBudget& budget) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("minimum_rounds: fraction must lie in (0,1)");
    }
    const double asymptotic = optimize_q_asymptotic(base, budget).rate;
    if (asymptotic <= 0.0) {
        throw infeasible_error("minimum_rounds: asymptotic rate is zero");
    }
    const double target = fraction * asymptotic;

    const auto rate_at = [&](double rounds) {
        try {
            return optimize_finite_key(base, std::llround(rounds), eps_tot_target, budget).rate;
        } catch (const infeasible_error&) {
            return 0.0;
        }
    };

    // Log2 grid to bracket, then multiplicative bisection to 5%.
    double lo = 1024.0;
    double hi = 0.0;
    for (int k = 11; k <= 62; ++k) {
        const double rounds = std::ldexp(1.0, k);
        if (rate_at(rounds) >= target) {
            hi = rounds;
            break;
        }
        lo = rounds;
    }
    if (hi == 0.0) {
        throw infeasible_error("minimum_rounds: target fraction unreachable");
    }
    while (hi / lo > 1.1) {
        const double mid = std::sqrt(lo * hi);
        if (rate_at(mid) >= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return std::llround(hi);
}

} // namespace tfcka
