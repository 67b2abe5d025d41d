#ifndef TFCKA_FINITE_KEY_HPP
#define TFCKA_FINITE_KEY_HPP

#include "tfcka/special_math.hpp"

#include <cstdint>
#include <vector>

namespace tfcka {

/// The epsilon budget of the finite-key security statement.
struct SecuritySplit {
    double eps_x = 0.0;
    double eps_z = 0.0;
    double eps_ec = 0.0;
    double eps_pa = 0.0;

    void validate(int num_parties) const;
};

/// Round accounting: L total rounds, of which on average M p_j L survive the
/// single-click filter; m go to parameter estimation, n to the raw key.
struct RoundCounts {
    std::int64_t total_rounds = 0;  // L
    Probability pe_prob;            // p_PE
    std::int64_t pe_samples = 0;    // m
    std::int64_t key_rounds = 0;    // n

    /// Builds (m, n) as rounded expectations from L, p_PE and M p_j.
    /// Throws infeasible_error if the accounting leaves no raw key.
    static RoundCounts from_expectations(std::int64_t total_rounds, double pe_prob,
                                         double click_prob_total);
};

/// Observed frequencies feeding the key-length bound.
struct ObservedFrequencies {
    Probability qz_m;                         // Q^m_Z
    std::vector<Probability> qber_m_per_pair; // Q^m_{A_1 A_i}, i = 2..N
};

/// Statistical correction gamma: the positive root of the log-binomial tail
/// equation relating the observed frequency on m samples to the unobserved n.
double gamma_correction(std::int64_t n, std::int64_t m, double lambda_m, double eps);

/// eps_PE = sqrt((N-1) eps_x + eps_z).
double eps_pe(const SecuritySplit& split, int num_parties);

/// eps_tot = 2 eps_PE + eps_EC + eps_PA.
double eps_total(const SecuritySplit& split, int num_parties);

/// Secret key length l(N), clamped at 0. Entropy arguments are clamped to
/// [0, 1/2] before applying the binary entropy.
double key_length(const ObservedFrequencies& freqs, const RoundCounts& counts,
                  const SecuritySplit& split, int num_parties);

/// Gross length minus the L h(p_PE) preshared-key cost, clamped at 0.
double net_key_length(double gross, std::int64_t total_rounds, double pe_prob);

} // namespace tfcka

#endif
