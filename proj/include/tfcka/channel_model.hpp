#ifndef TFCKA_CHANNEL_MODEL_HPP
#define TFCKA_CHANNEL_MODEL_HPP

#include "tfcka/special_math.hpp"

namespace tfcka {

/// Physical and protocol parameters of the N-party setup.
struct SetupParams {
    int num_parties = 2;              // N
    int num_ports = 2;                // M, beam splitter ports (M >= N)
    Probability vacuum_weight;        // q
    Probability transmittance;        // t
    double pol_misalignment = 0.0;    // theta, radians
    double phase_misalignment = 0.0;  // phi, radians
    Probability dark_count_prob;      // p_d

    void validate() const;
};

/// The single-click probability, QBER and phase-error rate of one round.
struct ChannelStatistics {
    Probability click_prob;   // p_j (per detector; the M events are disjoint)
    Probability qber;         // Q_{A_1 A_k}, minimized measurement angles
    Probability phase_error;  // Q_Z
};

/// Probability that only detector D_j clicks, dark counts excluded.
double single_click_probability(const SetupParams& params);

/// QBER between Alice_1 and any other party, conditioned on a single click.
double qber(const SetupParams& params);

/// Phase-error rate Q_Z conditioned on a single click.
double phase_error_rate(const SetupParams& params);

/// Probability that no photon reaches any detector: (q + (1-q)(1-t))^N.
double no_photon_probability(const SetupParams& params);

/// Pr[prod Z = +1] conditioned on no photon arriving.
double no_photon_phase_error(const SetupParams& params);

/// The triple (p_j, QBER, Q_Z) corrected for dark counts of probability p_d.
/// With p_d = 0 this is exactly the uncorrected triple.
ChannelStatistics dark_count_adjusted(const SetupParams& params);

} // namespace tfcka

#endif
