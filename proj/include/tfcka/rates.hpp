#ifndef TFCKA_RATES_HPP
#define TFCKA_RATES_HPP

#include "tfcka/channel_model.hpp"

#include <functional>
#include <map>
#include <string>

namespace tfcka {

/// A rate value together with the parameter point and the diagnostics of
/// whatever optimization produced it.
struct RateResult {
    double rate = 0.0;  // secret bits per protocol round
    SetupParams params;
    std::map<std::string, double> meta;
};

/// Loss in dB <-> transmittance; the only place the conversion lives.
double loss_db_to_transmittance(double loss_db);
double transmittance_to_loss_db(double t);

/// Asymptotic key rate r = M p_j^dc [1 - h(Q_Z^dc) - max_i h(Q^dc_{A_1 A_i})],
/// always on dark-count-adjusted statistics (p_d = 0 recovers the clean model).
RateResult asymptotic_rate(const SetupParams& params);

/// Direct-transmission benchmark -log2(1 - t^2)/(N-1). An upper bound on one
/// bipartite-iteration strategy, not a capacity.
RateResult direct_transmission_bound(int num_parties, double t);

/// max over divisors d of N-1 of (d/(N-1)) rate_fn(d+1). Ties break toward
/// the larger (more multipartite) divisor.
RateResult subgroup_optimized_rate(int num_parties, const std::function<double(int)>& rate_fn);

/// Small-(1-q), high-t approximation N q^{N-1}(1-q) t [1 - h(1/2 - 1/N)].
double approx_w_limit_rate(int num_parties, double q, double t);

/// Same regime, N-1 bipartite iterations: 2 q (1-q) t / (N-1).
double approx_bipartite_iteration_rate(int num_parties, double q, double t);

/// Divisors of n in increasing order.
std::vector<int> divisors(int n);

} // namespace tfcka

#endif
