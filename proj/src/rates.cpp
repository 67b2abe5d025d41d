#include "tfcka/rates.hpp"

#include "tfcka/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tfcka {

double loss_db_to_transmittance(double loss_db) {
    return std::pow(10.0, -loss_db / 10.0);
}

double transmittance_to_loss_db(double t) {
    return -10.0 * std::log10(t);
}

RateResult asymptotic_rate(const SetupParams& params) {
    const ChannelStatistics stats = dark_count_adjusted(params);
    // h is applied on the error-rate side; frequencies above 1/2 carry no
    // less adversarial information than 1/2.
    const double hq = binary_entropy(std::min(stats.qber.value(), 0.5));
    const double hz = binary_entropy(std::min(stats.phase_error.value(), 0.5));
    const double bracket = std::max(0.0, 1.0 - hz - hq);
    RateResult result;
    result.rate = params.num_ports * stats.click_prob.value() * bracket;
    result.params = params;
    result.meta["p_j"] = stats.click_prob;
    result.meta["qber"] = stats.qber;
    result.meta["q_z"] = stats.phase_error;
    return result;
}

RateResult direct_transmission_bound(int num_parties, double t) {
    if (num_parties < 2) {
        throw std::invalid_argument("direct_transmission_bound: need at least 2 parties");
    }
    if (!(t >= 0.0 && t < 1.0)) {
        throw std::domain_error("direct_transmission_bound: bound diverges at t = 1");
    }
    RateResult result;
    result.rate = -std::log2(1.0 - t * t) / (num_parties - 1);
    result.params.num_parties = num_parties;
    result.params.transmittance = Probability(t);
    return result;
}

std::vector<int> divisors(int n) {
    std::vector<int> divs;
    for (int d = 1; d <= n; ++d) {
        if (n % d == 0) divs.push_back(d);
    }
    return divs;
}

RateResult subgroup_optimized_rate(int num_parties, const std::function<double(int)>& rate_fn) {
    if (num_parties < 2) {
        throw std::invalid_argument("subgroup_optimized_rate: need at least 2 parties");
    }
    RateResult best;
    best.rate = -1.0;
    for (int d : divisors(num_parties - 1)) {
        const double rate = static_cast<double>(d) / (num_parties - 1) * rate_fn(d + 1);
        if (rate >= best.rate) {  // ties break toward larger d
            best.rate = rate;
            best.meta["divisor"] = d;
            best.meta["group_size"] = d + 1;
        }
    }
    best.rate = std::max(0.0, best.rate);
    return best;
}

double approx_w_limit_rate(int num_parties, double q, double t) {
    return num_parties * std::pow(q, num_parties - 1) * (1.0 - q) * t
           * (1.0 - binary_entropy(0.5 - 1.0 / num_parties));
}

double approx_bipartite_iteration_rate(int num_parties, double q, double t) {
    return 2.0 * q * (1.0 - q) * t / (num_parties - 1);
}

} // namespace tfcka
