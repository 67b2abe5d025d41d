#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tfcka/errors.hpp"
#include "tfcka/fock_oracle.hpp"

#include <cmath>
#include <sstream>

using namespace tfcka;

namespace {

SparseFockState pipeline(int n, int m, double q, double t, double theta, double phi) {
    SparseFockState state = prepare_initial(n, m, q, phi);
    state = apply_loss(state, t);
    state = apply_polarization_misalignment(state, theta);
    return apply_multiport(state);
}

SetupParams make(int n, int m, double q, double t, double theta = 0.0, double phi = 0.0) {
    SetupParams p;
    p.num_parties = n;
    p.num_ports = m;
    p.vacuum_weight = Probability(q);
    p.transmittance = Probability(t);
    p.pol_misalignment = theta;
    p.phase_misalignment = phi;
    return p;
}

} // namespace

TEST_CASE("initial state is normalized with one term per qubit pattern") {
    const SparseFockState state = prepare_initial(2, 2, 0.5, 0.0);
    CHECK(state.size() == 4);
    CHECK(state.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("every pipeline stage preserves the norm") {
    SparseFockState state = prepare_initial(3, 4, 0.7, 0.4);
    CHECK(state.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    state = apply_loss(state, 0.6);
    CHECK(state.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    state = apply_polarization_misalignment(state, 0.3);
    CHECK(state.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    state = apply_multiport(state);
    CHECK(state.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("click projectors are complete") {
    const SparseFockState state = pipeline(3, 3, 0.6, 0.7, 0.2, 0.3);
    double total = multi_click_probability(state);
    total += no_click_conditional_state(state).prob;
    for (int j = 1; j <= 3; ++j) total += conditional_click_state(state, j).prob;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("detectors are interchangeable") {
    const SparseFockState state = pipeline(3, 4, 0.7, 0.6, 0.2, 0.4);
    const ClickProjection first = conditional_click_state(state, 1);
    const MeasurementStatistics ref = measure_statistics(first.state, 1, 4);
    for (int j = 2; j <= 4; ++j) {
        const ClickProjection other = conditional_click_state(state, j);
        CHECK(other.prob == doctest::Approx(first.prob).epsilon(1e-12));
        const MeasurementStatistics stats = measure_statistics(other.state, j, 4);
        for (std::size_t i = 0; i < ref.qber_per_pair.size(); ++i) {
            CHECK(stats.qber_per_pair[i]
                  == doctest::Approx(ref.qber_per_pair[i]).epsilon(1e-11).scale(1.0));
        }
        CHECK(stats.phase_error == doctest::Approx(ref.phase_error).epsilon(1e-12));
    }
}

TEST_CASE("conditional states are valid density matrices") {
    const SparseFockState state = pipeline(3, 3, 0.8, 0.5, 0.1, 0.2);
    CHECK_NOTHROW(conditional_click_state(state, 1).state.check_valid());
    CHECK_NOTHROW(no_click_conditional_state(state).state.check_valid());
}

TEST_CASE("projection on a photon-free port set throws") {
    const SparseFockState state = prepare_initial(2, 2, 0.5, 0.0);
    CHECK_THROWS_AS(conditional_click_state(state, 1), zero_probability_error);
}

TEST_CASE("two-party simulation matches the hand-computed statistics") {
    const ChannelStatistics stats = oracle_statistics(make(2, 2, 0.5, 0.8));
    CHECK(stats.click_prob.value() == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(stats.qber.value() == doctest::Approx(0.1875).epsilon(1e-12));
    CHECK(stats.phase_error.value() == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("ideal single-excitation state statistics") {
    for (int n = 2; n <= 6; ++n) {
        const QubitDensityMatrix rho = ideal_w_state(n);
        CHECK_NOTHROW(rho.check_valid());
        const MeasurementStatistics stats = measure_statistics(rho, 1, n);
        for (double v : stats.qber_per_pair) {
            CHECK(v == doctest::Approx(0.5 - 1.0 / n).epsilon(1e-12));
        }
        CHECK(stats.phase_error == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("near-vacuum lossless pipeline approaches the ideal state") {
    const double q = 0.999;
    const ChannelStatistics stats = oracle_statistics(make(3, 3, q, 1.0));
    CHECK(std::abs(stats.qber.value() - (0.5 - 1.0 / 3.0)) < 10.0 * (1.0 - q));
    CHECK(stats.phase_error.value() < 10.0 * (1.0 - q));
}

TEST_CASE("simulation size guard") {
    CHECK_THROWS_AS(oracle_statistics(make(7, 7, 0.5, 0.5)), size_error);
    CHECK_THROWS_AS(oracle_statistics(make(4, 9, 0.5, 0.5)), size_error);
}

TEST_CASE("debug dump is line oriented with three separators") {
    const SparseFockState state = prepare_initial(2, 2, 0.5, 0.0);
    std::ostringstream out;
    state.dump(out);
    std::istringstream in(out.str());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        std::size_t pipes = 0;
        for (char c : line) {
            if (c == '|') ++pipes;
        }
        CHECK(pipes == 3);
        CHECK(line.substr(0, 2).find_first_not_of("01") == std::string::npos);
    }
    CHECK(lines == state.size());
}

TEST_CASE("density matrix validity checks reject broken inputs") {
    QubitDensityMatrix rho;
    rho.num_qubits = 1;
    rho.mat = Eigen::MatrixXcd::Zero(2, 2);
    rho.mat(0, 1) = std::complex<double>(0.0, 0.5);
    rho.mat(0, 0) = 1.0;
    CHECK_THROWS_AS(rho.check_valid(), std::logic_error);

    rho.mat = Eigen::MatrixXcd::Zero(2, 2);
    rho.mat(0, 0) = 2.0;
    rho.mat(1, 1) = -1.0;
    CHECK_THROWS_AS(rho.check_valid(), std::logic_error);
}
