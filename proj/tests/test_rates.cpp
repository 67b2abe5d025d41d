#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tfcka/rates.hpp"

#include <cmath>

using namespace tfcka;

namespace {

SetupParams make(int n, int m, double q, double t, double pd = 0.0) {
    SetupParams p;
    p.num_parties = n;
    p.num_ports = m;
    p.vacuum_weight = Probability(q);
    p.transmittance = Probability(t);
    p.dark_count_prob = Probability(pd);
    return p;
}

} // namespace

TEST_CASE("loss conversion") {
    CHECK(loss_db_to_transmittance(0.0) == 1.0);
    CHECK(loss_db_to_transmittance(10.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(loss_db_to_transmittance(3.0) == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-15));
    for (double db : {0.5, 7.0, 23.0, 55.0}) {
        CHECK(transmittance_to_loss_db(loss_db_to_transmittance(db))
              == doctest::Approx(db).epsilon(1e-13));
    }
}

TEST_CASE("asymptotic rate composes click probability and entropies") {
    const SetupParams p = make(2, 2, 0.5, 0.8);
    const ChannelStatistics stats = dark_count_adjusted(p);
    const double expected = 2.0 * stats.click_prob.value()
        * (1.0 - binary_entropy(stats.phase_error.value() > 0.5 ? 0.5 : stats.phase_error.value())
           - binary_entropy(stats.qber.value()));
    const RateResult result = asymptotic_rate(p);
    CHECK(result.rate == doctest::Approx(std::max(0.0, expected)).epsilon(1e-13));
    CHECK(result.meta.at("p_j") == stats.click_prob.value());
    CHECK(result.meta.at("qber") == stats.qber.value());
    CHECK(result.meta.at("q_z") == stats.phase_error.value());
}

TEST_CASE("asymptotic rate never goes negative") {
    // Heavy multiphoton noise: the entropy bracket would be negative.
    CHECK(asymptotic_rate(make(2, 2, 0.1, 0.9)).rate >= 0.0);
}

TEST_CASE("direct transmission benchmark") {
    CHECK(direct_transmission_bound(2, 0.5).rate
          == doctest::Approx(-std::log2(0.75)).epsilon(1e-15));
    CHECK(direct_transmission_bound(5, 0.5).rate
          == doctest::Approx(-std::log2(0.75) / 4.0).epsilon(1e-15));
    CHECK(direct_transmission_bound(2, 0.0).rate == 0.0);
    CHECK_THROWS_AS(direct_transmission_bound(2, 1.0), std::domain_error);
    CHECK_THROWS_AS(direct_transmission_bound(1, 0.5), std::invalid_argument);
}

TEST_CASE("divisors") {
    CHECK(divisors(1) == std::vector<int>{1});
    CHECK(divisors(4) == std::vector<int>{1, 2, 4});
    CHECK(divisors(12) == std::vector<int>{1, 2, 3, 4, 6, 12});
    CHECK(divisors(7) == std::vector<int>{1, 7});
}

TEST_CASE("subgroup optimization picks the best divisor, ties to the larger") {
    // N = 5 -> divisors {1, 2, 4}, weights d/4 on groups of size d+1.
    const auto fn = [](int size) { return size == 3 ? 1.0 : 0.1; };
    const RateResult best = subgroup_optimized_rate(5, fn);
    CHECK(best.rate == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(best.meta.at("group_size") == 3.0);

    // All group rates equal: every divisor yields d/4 * 1, max at d = 4.
    const RateResult full = subgroup_optimized_rate(5, [](int) { return 1.0; });
    CHECK(full.meta.at("divisor") == 4.0);

    // Exact tie between divisors resolves to the larger one.
    const RateResult tie =
        subgroup_optimized_rate(5, [](int size) { return 1.0 / (size - 1); });
    CHECK(tie.meta.at("divisor") == 4.0);
}

TEST_CASE("closed-form approximations") {
    CHECK(approx_w_limit_rate(5, 0.999, 0.9)
          == doctest::Approx(5.0 * std::pow(0.999, 4) * 0.001 * 0.9
                             * (1.0 - binary_entropy(0.3))).epsilon(1e-14));
    CHECK(approx_bipartite_iteration_rate(5, 0.999, 0.9)
          == doctest::Approx(2.0 * 0.999 * 0.001 * 0.9 / 4.0).epsilon(1e-14));
}
