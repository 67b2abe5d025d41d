#include "tfcka/special_math.hpp"

#include <cmath>
#include <string>

namespace tfcka {

Probability::Probability(double v) {
    if (!(v >= -kDomainSlack && v <= 1.0 + kDomainSlack)) {
        throw std::domain_error("Probability out of [0,1]: " + std::to_string(v));
    }
    v_ = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

double binary_entropy(double x) {
    if (!(x >= -kDomainSlack && x <= 1.0 + kDomainSlack)) {
        throw std::domain_error("binary_entropy: argument outside [0,1]: " + std::to_string(x));
    }
    if (x <= 0.0 || x >= 1.0) return 0.0;  // 0 log 0 := 0
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double ln_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("ln_gamma: argument must be positive: " + std::to_string(x));
    }
    return std::lgamma(x);
}

namespace {

// Stirling tail S(z) with ln G(z) = (z-1/2) ln z - z + ln(2 pi)/2 + S(z).
// Accurate to well below 1e-15 for z >= 30.
double stirling_tail(double z) {
    const double z2 = z * z;
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * z2)) / z2) / z2) / z2) / z;
}

} // namespace

double ln_gamma_diff(double a, double c) {
    if (!(c >= 0.0 && a >= c)) {
        throw std::domain_error("ln_gamma_diff: requires a >= c >= 0");
    }
    const double z1 = a + 1.0;
    const double z2 = c + 1.0;
    if (z2 < 30.0) {
        // lgamma(z2) is small in magnitude; no large-large cancellation.
        return std::lgamma(z1) - std::lgamma(z2);
    }
    // (z1-1/2) ln z1 - (z2-1/2) ln z2 rewritten around log1p of the gap,
    // so the result carries the accuracy of the gap, not of the huge terms.
    const double d = z1 - z2;
    return (z2 - 0.5) * std::log1p(d / z2) + d * std::log(z1) - d
           + stirling_tail(z1) - stirling_tail(z2);
}

double ln_binomial(double a, double b) {
    if (!(b >= 0.0 && a >= b)) {
        throw std::domain_error("ln_binomial: requires a >= b >= 0");
    }
    // Pair the two largest gamma arguments in ln_gamma_diff.
    const double small = std::min(b, a - b);
    const double large = a - small;
    return ln_gamma_diff(a, large) - std::lgamma(small + 1.0);
}

double clamp_probability(double v, const char* what) {
    if (v < -kProbabilityBugTol || v > 1.0 + kProbabilityBugTol) {
        throw std::logic_error(std::string(what) + ": probability " + std::to_string(v)
                               + " violates [0,1] beyond roundoff");
    }
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

} // namespace tfcka
