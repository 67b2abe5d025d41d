#include "tfcka/finite_key.hpp"

#include "tfcka/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tfcka {

namespace {

constexpr double kGammaResidualTol = 1e-9;
constexpr double kGammaIntervalTol = 1e-15;
constexpr int kGammaMaxIterations = 200;

// Log-domain residual of the tail-bound equation; decreasing in gamma on
// [0, 1 - lambda].
double gamma_residual(double n, double m, double lambda, double log_eps, double gamma) {
    const double bot = m * (1.0 - lambda);
    // At gamma = 1 - lambda the second binomial is C(bot, bot); keep roundoff
    // from pushing its upper argument below the lower one.
    const double top = std::max((n + m) * (1.0 - lambda) - n * gamma, bot);
    const double lhs = ln_binomial(n * (lambda + gamma) + m * lambda, m * lambda)
                     + ln_binomial(top, bot);
    const double rhs = ln_binomial(n + m, m) + log_eps;
    return lhs - rhs;
}

} // namespace

void SecuritySplit::validate(int num_parties) const {
    if (!(eps_x > 0.0 && eps_z > 0.0 && eps_ec > 0.0 && eps_pa > 0.0)) {
        throw std::invalid_argument("SecuritySplit: all epsilons must be positive");
    }
    if (2.0 * (num_parties - 1) * eps_pe(*this, num_parties) >= 1.0) {
        throw std::invalid_argument("SecuritySplit: 2(N-1) eps_PE must be below 1");
    }
}

RoundCounts RoundCounts::from_expectations(std::int64_t total_rounds, double pe_prob,
                                           double click_prob_total) {
    if (total_rounds <= 0) {
        throw std::invalid_argument("RoundCounts: total rounds must be positive");
    }
    const double kept = click_prob_total * static_cast<double>(total_rounds);
    RoundCounts counts;
    counts.total_rounds = total_rounds;
    counts.pe_prob = Probability(pe_prob);
    counts.pe_samples = std::llround(kept * pe_prob);
    counts.key_rounds = std::llround(kept) - 2 * counts.pe_samples;
    if (counts.pe_samples < 1 || counts.key_rounds < 1) {
        throw infeasible_error("RoundCounts: accounting leaves no PE samples or raw key");
    }
    return counts;
}

double gamma_correction(std::int64_t n_rounds, std::int64_t m_samples, double lambda_m, double eps) {
    if (n_rounds < 1 || m_samples < 1) {
        throw std::invalid_argument("gamma_correction: need n, m >= 1");
    }
    if (!(lambda_m >= 0.0 && lambda_m <= 1.0)) {
        throw std::domain_error("gamma_correction: lambda outside [0,1]");
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::domain_error("gamma_correction: eps outside (0,1)");
    }
    if (lambda_m >= 1.0) return 0.0;  // no room above the observed frequency

    const double n = static_cast<double>(n_rounds);
    const double m = static_cast<double>(m_samples);
    const double log_eps = std::log(eps);

    double lo = 0.0;
    double hi = 1.0 - lambda_m;
    double f_lo = gamma_residual(n, m, lambda_m, log_eps, lo);
    double f_hi = gamma_residual(n, m, lambda_m, log_eps, hi);
    if (f_lo <= 0.0 || f_hi > 0.0) {
        throw no_root_error("gamma_correction: no root in (0, 1 - lambda]");
    }
    double mid = 0.5 * hi;
    for (int i = 0; i < kGammaMaxIterations; ++i) {
        mid = 0.5 * (lo + hi);
        const double f_mid = gamma_residual(n, m, lambda_m, log_eps, mid);
        if (std::abs(f_mid) <= kGammaResidualTol || hi - lo < kGammaIntervalTol) break;
        if (f_mid > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

double eps_pe(const SecuritySplit& split, int num_parties) {
    return std::sqrt((num_parties - 1) * split.eps_x + split.eps_z);
}

double eps_total(const SecuritySplit& split, int num_parties) {
    return 2.0 * eps_pe(split, num_parties) + split.eps_ec + split.eps_pa;
}

double key_length(const ObservedFrequencies& freqs, const RoundCounts& counts,
                  const SecuritySplit& split, int num_parties) {
    split.validate(num_parties);
    if (static_cast<int>(freqs.qber_m_per_pair.size()) != num_parties - 1) {
        throw std::invalid_argument("key_length: need one QBER frequency per pair");
    }
    const auto corrected = [&](double freq, double eps) {
        const double g = gamma_correction(counts.key_rounds, counts.pe_samples, freq, eps);
        return std::clamp(freq + g, 0.0, 0.5);
    };

    const double hz = binary_entropy(corrected(freqs.qz_m, split.eps_z));
    double hx = 0.0;
    for (const Probability& qm : freqs.qber_m_per_pair) {
        hx = std::max(hx, binary_entropy(corrected(qm, split.eps_x)));
    }

    const double pe = eps_pe(split, num_parties);
    const double length = counts.key_rounds * (1.0 - hz - hx)
        - std::log2(2.0 * (num_parties - 1) / split.eps_ec)
        - 2.0 * std::log2((1.0 - 2.0 * (num_parties - 1) * pe) / (2.0 * split.eps_pa));
    return std::max(0.0, length);
}

double net_key_length(double gross, std::int64_t total_rounds, double pe_prob) {
    if (gross < 0.0) {
        throw std::invalid_argument("net_key_length: gross length must be nonnegative");
    }
    return std::max(0.0, gross - static_cast<double>(total_rounds) * binary_entropy(pe_prob));
}

} // namespace tfcka
