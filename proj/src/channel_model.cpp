#include "tfcka/channel_model.hpp"

#include "tfcka/errors.hpp"

#include <cmath>
#include <string>

namespace tfcka {

void SetupParams::validate() const {
    if (num_parties < 2) {
        throw std::invalid_argument("SetupParams: need at least 2 parties");
    }
    if (num_ports < num_parties) {
        throw std::invalid_argument("SetupParams: need at least as many ports as parties");
    }
}

namespace {

// exp(ln C(n,k) + ln k!) and friends, assembled in log domain so that
// factorials up to N! never overflow intermediate products.
double binom(int n, int k) { return std::exp(ln_binomial(n, k)); }
double factorial(int k) { return std::exp(ln_gamma(k + 1.0)); }

} // namespace

double single_click_probability(const SetupParams& params) {
    params.validate();
    const int n = params.num_parties;
    const double q = params.vacuum_weight;
    const double t = params.transmittance;
    const double tm = t / params.num_ports;
    const double c2 = std::cos(params.pol_misalignment) * std::cos(params.pol_misalignment);
    const double s2 = std::sin(params.pol_misalignment) * std::sin(params.pol_misalignment);

    // Single-photon term: the clicking photon came from the one excited party.
    double p = n * std::pow(q, n - 1) * (1.0 - q) * tm;

    // Configurations where Alice_1's qubit stayed in |0>.
    for (int r = 2; r <= n - 1; ++r) {
        double inner = 0.0;
        for (int l = 1; l <= r; ++l) {
            inner += binom(r, l) * std::pow(tm, l) * std::pow(1.0 - t, r - l) * factorial(l);
        }
        p += binom(n - 1, r) * std::pow(q, n - r) * std::pow(1.0 - q, r) * inner;
    }

    // Configurations including Alice_1's photon; her polarization is the
    // reference, so the misalignment angle enters only here.
    for (int r = 2; r <= n; ++r) {
        double inner = 0.0;
        for (int l = 1; l <= r; ++l) {
            inner += binom(r - 1, l - 1) * std::pow(tm, l) * std::pow(1.0 - t, r - l)
                     * factorial(l - 1) * (s2 + l * c2);
        }
        for (int l = 1; l <= r - 1; ++l) {
            inner += binom(r - 1, l) * std::pow(tm, l) * std::pow(1.0 - t, r - l) * factorial(l);
        }
        p += binom(n - 1, r - 1) * std::pow(q, n - r) * std::pow(1.0 - q, r) * inner;
    }
    return clamp_probability(p, "single_click_probability");
}

double qber(const SetupParams& params) {
    const double pj = single_click_probability(params);
    if (pj <= 0.0) {
        throw undefined_statistics_error("qber: single-click probability is zero");
    }
    const int n = params.num_parties;
    const double q = params.vacuum_weight;
    const double t = params.transmittance;
    const double tm = t / params.num_ports;

    double corr = 0.0;
    for (int r = 0; r <= n - 2; ++r) {
        double inner = 0.0;
        for (int l = 0; l <= r; ++l) {
            inner += binom(r, l) * factorial(l + 1) * std::pow(tm, l + 1) * std::pow(1.0 - t, r - l);
        }
        corr += binom(n - 2, r) * std::pow(q, n - r - 1) * std::pow(1.0 - q, r + 1) * inner;
    }
    const double value = 0.5
        - std::cos(params.phase_misalignment) * std::cos(params.pol_misalignment) * corr / pj;
    return clamp_probability(value, "qber");
}

double phase_error_rate(const SetupParams& params) {
    const double pj = single_click_probability(params);
    if (pj <= 0.0) {
        throw undefined_statistics_error("phase_error_rate: single-click probability is zero");
    }
    const int n = params.num_parties;
    const double q = params.vacuum_weight;
    const double t = params.transmittance;
    const double tm = t / params.num_ports;
    const double c2 = std::cos(params.pol_misalignment) * std::cos(params.pol_misalignment);
    const double s2 = std::sin(params.pol_misalignment) * std::sin(params.pol_misalignment);

    // Even Hamming weight of excited qubits, Alice_1 unexcited.
    double acc = 0.0;
    for (int r = 1; 2 * r <= n - 1; ++r) {
        double inner = 0.0;
        for (int l = 1; l <= 2 * r; ++l) {
            inner += binom(2 * r, l) * std::pow(tm, l) * std::pow(1.0 - t, 2 * r - l) * factorial(l);
        }
        acc += binom(n - 1, 2 * r) * std::pow(q, n - 2 * r) * std::pow(1.0 - q, 2 * r) * inner;
    }
    // Even weight with Alice_1 excited.
    for (int r = 1; 2 * r <= n; ++r) {
        double inner = 0.0;
        for (int l = 1; l <= 2 * r - 1; ++l) {
            inner += binom(2 * r - 1, l) * std::pow(tm, l) * std::pow(1.0 - t, 2 * r - l) * factorial(l);
        }
        for (int l = 1; l <= 2 * r; ++l) {
            inner += binom(2 * r - 1, l - 1) * std::pow(tm, l) * std::pow(1.0 - t, 2 * r - l)
                     * factorial(l - 1) * (s2 + l * c2);
        }
        acc += binom(n - 1, 2 * r - 1) * std::pow(q, n - 2 * r) * std::pow(1.0 - q, 2 * r) * inner;
    }
    return clamp_probability(acc / pj, "phase_error_rate");
}

double no_photon_probability(const SetupParams& params) {
    params.validate();
    const double q = params.vacuum_weight;
    const double t = params.transmittance;
    return std::pow(q + (1.0 - q) * (1.0 - t), params.num_parties);
}

double no_photon_phase_error(const SetupParams& params) {
    const double pnp = no_photon_probability(params);
    if (pnp <= 0.0) {
        throw undefined_statistics_error("no_photon_phase_error: no-photon probability is zero");
    }
    const int n = params.num_parties;
    const double q = params.vacuum_weight;
    const double t = params.transmittance;
    double acc = 0.0;
    for (int l = 0; 2 * l <= n; ++l) {
        acc += binom(n, 2 * l) * std::pow(q, n - 2 * l)
               * std::pow((1.0 - q) * (1.0 - t), 2 * l);
    }
    return clamp_probability(acc / pnp, "no_photon_phase_error");
}

ChannelStatistics dark_count_adjusted(const SetupParams& params) {
    params.validate();
    const double pd = params.dark_count_prob;
    const double pj = single_click_probability(params);

    if (pd == 0.0) {
        // The dark-count terms vanish identically; return the base triple so
        // the p_d = 0 reduction is exact.
        if (pj <= 0.0) {
            throw undefined_statistics_error("dark_count_adjusted: click probability is zero");
        }
        return ChannelStatistics{Probability(pj), Probability(qber(params)),
                                 Probability(phase_error_rate(params))};
    }

    const double survive = std::pow(1.0 - pd, params.num_ports - 1);
    const double pnp = no_photon_probability(params);
    const double pj_dc = pj * survive + pd * survive * pnp;
    if (pj_dc <= 0.0) {
        throw undefined_statistics_error("dark_count_adjusted: click probability is zero");
    }

    // When p_j = 0 every click is a dark count and the photon-conditioned
    // error rates carry zero weight.
    const double qber_weighted = pj > 0.0 ? qber(params) * pj * survive : 0.0;
    const double qz_weighted = pj > 0.0 ? phase_error_rate(params) * pj * survive : 0.0;
    const double qz_noph = no_photon_phase_error(params);

    const double qber_dc = (0.5 * pnp * pd * survive + qber_weighted) / pj_dc;
    const double qz_dc = (qz_noph * pnp * pd * survive + qz_weighted) / pj_dc;
    return ChannelStatistics{Probability(clamp_probability(pj_dc, "dark_count_adjusted.p_j")),
                             Probability(clamp_probability(qber_dc, "dark_count_adjusted.qber")),
                             Probability(clamp_probability(qz_dc, "dark_count_adjusted.q_z"))};
}

} // namespace tfcka
