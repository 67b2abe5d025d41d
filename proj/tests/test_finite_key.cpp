#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tfcka/errors.hpp"
#include "tfcka/finite_key.hpp"

#include <cmath>
#include <random>

using namespace tfcka;

namespace {

// Independent transcription of the tail-bound residual at the reported root.
double residual_at(double n, double m, double lambda, double eps, double gamma) {
    const double bot = m * (1.0 - lambda);
    const double top = std::max((n + m) * (1.0 - lambda) - n * gamma, bot);
    return ln_binomial(n * (lambda + gamma) + m * lambda, m * lambda) + ln_binomial(top, bot)
         - ln_binomial(n + m, m) - std::log(eps);
}

SecuritySplit default_split() {
    SecuritySplit split;
    split.eps_x = 1e-19;
    split.eps_z = 1e-19;
    split.eps_ec = 1e-9;
    split.eps_pa = 1e-9;
    return split;
}

} // namespace

TEST_CASE("round accounting from expectations") {
    const RoundCounts counts = RoundCounts::from_expectations(1'000'000, 0.1, 0.05);
    CHECK(counts.total_rounds == 1'000'000);
    CHECK(counts.pe_samples == 5'000);
    CHECK(counts.key_rounds == 40'000);
    CHECK_THROWS_AS(RoundCounts::from_expectations(100, 0.1, 0.01), infeasible_error);
    CHECK_THROWS_AS(RoundCounts::from_expectations(0, 0.1, 0.5), std::invalid_argument);
}

TEST_CASE("gamma solver leaves a small residual") {
    // Ranges keep the log-binomials below ~1e5 so the residual itself is
    // representable to 1e-9 in double precision.
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const std::int64_t m = static_cast<std::int64_t>(std::pow(10.0, 2.0 + 2.0 * u(rng)));
        const std::int64_t n =
            m + static_cast<std::int64_t>(std::pow(10.0, 2.0 + 5.0 * u(rng)));
        const double lambda = 0.01 + 0.49 * u(rng);
        const double eps = std::pow(10.0, -12.0 + 9.0 * u(rng));
        const double gamma = gamma_correction(n, m, lambda, eps);
        CHECK(gamma > 0.0);
        CHECK(gamma <= 1.0 - lambda);
        CHECK(std::abs(residual_at(static_cast<double>(n), static_cast<double>(m), lambda, eps,
                                   gamma))
              <= 1e-9);
    }
}

TEST_CASE("gamma shrinks with more key rounds and a looser epsilon") {
    std::mt19937 rng(987654);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const std::int64_t m = 100 + static_cast<std::int64_t>(9'900 * u(rng));
        const std::int64_t n = m + static_cast<std::int64_t>(1e6 * u(rng));
        const double lambda = 0.05 + 0.4 * u(rng);
        const double eps = std::pow(10.0, -10.0 + 6.0 * u(rng));
        const double base = gamma_correction(n, m, lambda, eps);
        CHECK(gamma_correction(4 * n, m, lambda, eps) <= base + 1e-7);
        CHECK(gamma_correction(n, m, lambda, 10.0 * eps) <= base + 1e-7);
    }
}

TEST_CASE("gamma solver edge cases") {
    CHECK(gamma_correction(1000, 100, 1.0, 1e-6) == 0.0);
    CHECK_THROWS_AS(gamma_correction(0, 100, 0.1, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(gamma_correction(1000, 100, -0.1, 1e-6), std::domain_error);
    CHECK_THROWS_AS(gamma_correction(1000, 100, 0.1, 2.0), std::domain_error);
    // eps close to 1 asks for a looser bound than zero correction already
    // gives; there is no positive root.
    CHECK_THROWS_AS(gamma_correction(100, 100, 0.5, 0.9999), no_root_error);
}

TEST_CASE("epsilon composition") {
    SecuritySplit split;
    split.eps_x = 4e-18;
    split.eps_z = 5e-18;
    split.eps_ec = 1e-10;
    split.eps_pa = 2e-10;
    const int n = 3;
    CHECK(eps_pe(split, n) == doctest::Approx(std::sqrt(2.0 * 4e-18 + 5e-18)).epsilon(1e-15));
    CHECK(eps_total(split, n)
          == doctest::Approx(2.0 * eps_pe(split, n) + 3e-10).epsilon(1e-15));
    CHECK_NOTHROW(split.validate(n));

    SecuritySplit bad = split;
    bad.eps_ec = 0.0;
    CHECK_THROWS_AS(bad.validate(n), std::invalid_argument);
    bad = split;
    bad.eps_x = 0.3;
    bad.eps_z = 0.3;
    CHECK_THROWS_AS(bad.validate(n), std::invalid_argument);
}

TEST_CASE("key length reproduces its own composition") {
    const RoundCounts counts = RoundCounts::from_expectations(100'000'000, 0.1, 0.01);
    const SecuritySplit split = default_split();
    const int n = 2;

    ObservedFrequencies freqs;
    freqs.qz_m = Probability(0.05);
    freqs.qber_m_per_pair = {Probability(0.03)};
    const double got = key_length(freqs, counts, split, n);

    const double gz = gamma_correction(counts.key_rounds, counts.pe_samples, 0.05, split.eps_z);
    const double gx = gamma_correction(counts.key_rounds, counts.pe_samples, 0.03, split.eps_x);
    const double pe = eps_pe(split, n);
    const double expected = counts.key_rounds
            * (1.0 - binary_entropy(0.05 + gz) - binary_entropy(0.03 + gx))
        - std::log2(2.0 / split.eps_ec)
        - 2.0 * std::log2((1.0 - 2.0 * pe) / (2.0 * split.eps_pa));
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("key length falls with worse observations and clamps at zero") {
    const RoundCounts counts = RoundCounts::from_expectations(100'000'000, 0.1, 0.01);
    const SecuritySplit split = default_split();
    double prev = -1.0;
    ObservedFrequencies freqs;
    freqs.qber_m_per_pair = {Probability(0.02)};
    for (double qz : {0.45, 0.3, 0.1, 0.01}) {
        freqs.qz_m = Probability(qz);
        const double len = key_length(freqs, counts, split, 2);
        CHECK(len >= prev);
        prev = len;
    }
    freqs.qz_m = Probability(0.5);
    CHECK(key_length(freqs, counts, split, 2) == 0.0);
}

TEST_CASE("multiparty key length takes the worst pair") {
    const RoundCounts counts = RoundCounts::from_expectations(100'000'000, 0.1, 0.01);
    SecuritySplit split = default_split();
    ObservedFrequencies freqs;
    freqs.qz_m = Probability(0.05);
    freqs.qber_m_per_pair = {Probability(0.02), Probability(0.10)};
    const double mixed = key_length(freqs, counts, split, 3);
    freqs.qber_m_per_pair = {Probability(0.10), Probability(0.10)};
    const double worst = key_length(freqs, counts, split, 3);
    CHECK(mixed == doctest::Approx(worst).epsilon(1e-12));
    freqs.qber_m_per_pair = {Probability(0.10)};
    CHECK_THROWS_AS(key_length(freqs, counts, split, 3), std::invalid_argument);
}

TEST_CASE("net key length subtracts the preshared-key cost") {
    CHECK(net_key_length(1000.0, 100, 0.0) == 1000.0);
    CHECK(net_key_length(1000.0, 1000, 0.5) == 0.0);
    const double cost = 10'000 * binary_entropy(0.1);
    CHECK(net_key_length(8000.0, 10'000, 0.1) == doctest::Approx(8000.0 - cost).epsilon(1e-12));
    CHECK_THROWS_AS(net_key_length(-1.0, 10, 0.1), std::invalid_argument);
}
