#include "tfcka/fock_oracle.hpp"

#include "tfcka/errors.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <ostream>

namespace tfcka {

namespace {

constexpr double kPruneThreshold = 1e-15;
constexpr int kMaxOracleParties = 6;
constexpr int kMaxOraclePorts = 8;

// U_{kj} of the Bell-multiport beam splitter (discrete-Fourier unitary).
std::complex<double> multiport_entry(int k, int j, int num_ports) {
    const double arg = 2.0 * std::numbers::pi * (k - 1) * (j - 1) / num_ports;
    return std::polar(1.0 / std::sqrt(static_cast<double>(num_ports)), arg);
}

double sqrt_factorial(int n) {
    double v = 1.0;
    for (int i = 2; i <= n; ++i) v *= std::sqrt(static_cast<double>(i));
    return v;
}

// One creation-operator substitution: source mode -> linear combination of
// target modes. Empty entry = mode untouched.
using ModeExpansion = std::vector<std::vector<std::pair<int, std::complex<double>>>>;

void expand_photons(const std::vector<int>& photons, std::size_t idx,
                    const ModeExpansion& sub, FockTerm& term,
                    std::complex<double> amplitude, SparseFockState& out) {
    if (idx == photons.size()) {
        out.add(term, amplitude);
        return;
    }
    for (const auto& [target, coeff] : sub[photons[idx]]) {
        term.occupations[target] += 1;
        // |n> -> sqrt(n+1) |n+1> when a creation operator is applied.
        const double boson = std::sqrt(static_cast<double>(term.occupations[target]));
        expand_photons(photons, idx + 1, sub, term, amplitude * coeff * boson, out);
        term.occupations[target] -= 1;
    }
}

SparseFockState apply_substitution(const SparseFockState& state, const ModeExpansion& sub) {
    SparseFockState out(state.layout());
    for (const auto& [term, amp] : state.terms()) {
        FockTerm work = term;
        std::vector<int> photons;
        std::complex<double> coeff = amp;
        for (int mode = 0; mode < static_cast<int>(sub.size()); ++mode) {
            if (sub[mode].empty()) continue;
            const int n = work.occupations[mode];
            if (n == 0) continue;
            // Rewrite |n> as its operator monomial before substituting.
            coeff /= sqrt_factorial(n);
            for (int p = 0; p < n; ++p) photons.push_back(mode);
            work.occupations[mode] = 0;
        }
        expand_photons(photons, 0, sub, work, coeff, out);
    }
    out.prune(kPruneThreshold);
    return out;
}

bool port_occupied(const FockTerm& term, const ModeLayout& layout, int j) {
    return term.occupations[layout.port_mode(j, false)] > 0
        || term.occupations[layout.port_mode(j, true)] > 0;
}

int occupied_port_count(const FockTerm& term, const ModeLayout& layout) {
    int count = 0;
    for (int j = 1; j <= layout.num_ports; ++j) {
        if (port_occupied(term, layout, j)) ++count;
    }
    return count;
}

// Reduces a projected (unnormalized) set of terms to the qubit density
// matrix by tracing out every optical mode.
ClickProjection reduce_to_qubits(const ModeLayout& layout,
                                 const std::map<std::vector<std::uint8_t>,
                                                std::vector<std::pair<std::uint32_t, std::complex<double>>>>& grouped) {
    const int dim = 1 << layout.num_parties;
    ClickProjection result;
    result.state.num_qubits = layout.num_parties;
    result.state.mat = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [occ, entries] : grouped) {
        for (const auto& [b, a] : entries) {
            for (const auto& [bp, ap] : entries) {
                result.state.mat(b, bp) += a * std::conj(ap);
            }
            result.prob += std::norm(a);
        }
    }
    if (result.prob < 1e-300) {
        throw zero_probability_error("projection probability underflowed; conditional state undefined");
    }
    result.state.mat /= result.prob;
    return result;
}

} // namespace

void SparseFockState::add(const FockTerm& term, std::complex<double> amplitude) {
    auto [it, inserted] = amps_.try_emplace(term, amplitude);
    if (!inserted) it->second += amplitude;
}

double SparseFockState::norm_squared() const {
    double n = 0.0;
    for (const auto& [term, amp] : amps_) n += std::norm(amp);
    return n;
}

void SparseFockState::prune(double threshold) {
    for (auto it = amps_.begin(); it != amps_.end();) {
        if (std::abs(it->second) < threshold) {
            it = amps_.erase(it);
        } else {
            ++it;
        }
    }
}

void SparseFockState::dump(std::ostream& out) const {
    char buf[64];
    for (const auto& [term, amp] : amps_) {
        for (int k = 1; k <= layout_.num_parties; ++k) {
            out << (((term.qubits >> (k - 1)) & 1u) ? '1' : '0');
        }
        out << " | ";
        for (std::size_t i = 0; i < term.occupations.size(); ++i) {
            if (i) out << ',';
            out << static_cast<int>(term.occupations[i]);
        }
        std::snprintf(buf, sizeof(buf), " | %.17g | %.17g\n", amp.real(), amp.imag());
        out << buf;
    }
}

void QubitDensityMatrix::check_valid() const {
    const double herm = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) {
        throw std::logic_error("density matrix not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mat);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw std::logic_error("density matrix not positive semidefinite");
    }
    if (std::abs(mat.trace().real() - 1.0) > 1e-12 || std::abs(mat.trace().imag()) > 1e-12) {
        throw std::logic_error("density matrix trace differs from 1");
    }
}

SparseFockState prepare_initial(int num_parties, int num_ports, double q, double phi) {
    if (num_parties < 2) {
        throw std::invalid_argument("prepare_initial: need at least 2 parties");
    }
    Probability{q};
    const ModeLayout layout{num_parties, num_ports};
    SparseFockState state(layout);
    const double a0 = std::sqrt(q);
    const double a1 = std::sqrt(1.0 - q);
    for (std::uint32_t b = 0; b < (1u << num_parties); ++b) {
        FockTerm term;
        term.qubits = b;
        term.occupations.assign(layout.size(), 0);
        std::complex<double> amp = 1.0;
        for (int k = 1; k <= num_parties; ++k) {
            if ((b >> (k - 1)) & 1u) {
                // Phase mismatch is zero for party 1, phi for everyone else.
                amp *= a1 * std::polar(1.0, k == 1 ? 0.0 : phi);
                term.occupations[layout.input_mode(k, false)] = 1;
            } else {
                amp *= a0;
            }
        }
        if (std::abs(amp) >= kPruneThreshold) state.add(term, amp);
    }
    return state;
}

SparseFockState apply_loss(const SparseFockState& state, double t) {
    Probability{t};
    const ModeLayout& layout = state.layout();
    ModeExpansion sub(layout.size());
    for (int k = 1; k <= layout.num_parties; ++k) {
        auto& entry = sub[layout.input_mode(k, false)];
        if (t > 0.0) entry.push_back({layout.input_mode(k, false), std::sqrt(t)});
        if (t < 1.0) entry.push_back({layout.loss_mode(k), std::sqrt(1.0 - t)});
    }
    return apply_substitution(state, sub);
}

SparseFockState apply_polarization_misalignment(const SparseFockState& state, double theta) {
    const ModeLayout& layout = state.layout();
    ModeExpansion sub(layout.size());
    for (int k = 2; k <= layout.num_parties; ++k) {
        auto& entry = sub[layout.input_mode(k, false)];
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        if (c != 0.0) entry.push_back({layout.input_mode(k, false), c});
        if (s != 0.0) entry.push_back({layout.input_mode(k, true), -s});
    }
    return apply_substitution(state, sub);
}

SparseFockState apply_multiport(const SparseFockState& state) {
    const ModeLayout& layout = state.layout();
    ModeExpansion sub(layout.size());
    for (int k = 1; k <= layout.num_parties; ++k) {
        for (bool perp : {false, true}) {
            auto& entry = sub[layout.input_mode(k, perp)];
            for (int j = 1; j <= layout.num_ports; ++j) {
                entry.push_back({layout.port_mode(j, perp), multiport_entry(k, j, layout.num_ports)});
            }
        }
    }
    return apply_substitution(state, sub);
}

ClickProjection conditional_click_state(const SparseFockState& state, int port_j) {
    const ModeLayout& layout = state.layout();
    if (port_j < 1 || port_j > layout.num_ports) {
        throw std::invalid_argument("conditional_click_state: port index out of range");
    }
    std::map<std::vector<std::uint8_t>, std::vector<std::pair<std::uint32_t, std::complex<double>>>> grouped;
    for (const auto& [term, amp] : state.terms()) {
        if (!port_occupied(term, layout, port_j)) continue;
        bool others_vacant = true;
        for (int j = 1; j <= layout.num_ports && others_vacant; ++j) {
            if (j != port_j && port_occupied(term, layout, j)) others_vacant = false;
        }
        if (!others_vacant) continue;
        grouped[term.occupations].push_back({term.qubits, amp});
    }
    return reduce_to_qubits(layout, grouped);
}

ClickProjection no_click_conditional_state(const SparseFockState& state) {
    const ModeLayout& layout = state.layout();
    std::map<std::vector<std::uint8_t>, std::vector<std::pair<std::uint32_t, std::complex<double>>>> grouped;
    for (const auto& [term, amp] : state.terms()) {
        if (occupied_port_count(term, layout) != 0) continue;
        grouped[term.occupations].push_back({term.qubits, amp});
    }
    return reduce_to_qubits(layout, grouped);
}

double multi_click_probability(const SparseFockState& state) {
    double p = 0.0;
    for (const auto& [term, amp] : state.terms()) {
        if (occupied_port_count(term, state.layout()) >= 2) p += std::norm(amp);
    }
    return p;
}

MeasurementStatistics measure_statistics_with_angles(const QubitDensityMatrix& rho,
                                                     const std::vector<double>& angles) {
    const int n = rho.num_qubits;
    if (static_cast<int>(angles.size()) != n) {
        throw std::invalid_argument("measure_statistics: need one angle per party");
    }
    const int dim = 1 << n;
    MeasurementStatistics stats;

    // O_XY(phi) eigenprojector |v><v| with v = (|0> + lambda e^{i phi} |1>)/sqrt(2).
    auto projector_entry = [](double phi, int lambda, int row, int col) {
        const std::complex<double> v1 = static_cast<double>(lambda) * std::polar(1.0, phi);
        const std::complex<double> r = row == 0 ? std::complex<double>(1.0) : v1;
        const std::complex<double> c = col == 0 ? std::complex<double>(1.0) : v1;
        return 0.5 * r * std::conj(c);
    };

    for (int k = 2; k <= n; ++k) {
        double disagree = 0.0;
        for (auto [l1, lk] : {std::pair{+1, -1}, std::pair{-1, +1}}) {
            std::complex<double> trace = 0.0;
            for (int x = 0; x < dim; ++x) {
                for (int bit1 = 0; bit1 < 2; ++bit1) {
                    for (int bitk = 0; bitk < 2; ++bitk) {
                        int y = x;
                        y = (y & ~1) | bit1;
                        y = (y & ~(1 << (k - 1))) | (bitk << (k - 1));
                        const std::complex<double> a =
                            projector_entry(angles[0], l1, x & 1, bit1)
                            * projector_entry(angles[k - 1], lk, (x >> (k - 1)) & 1, bitk);
                        trace += a * rho.mat(y, x);
                    }
                }
            }
            disagree += trace.real();
        }
        stats.qber_per_pair.push_back(disagree);
    }

    for (int x = 0; x < dim; ++x) {
        if (std::popcount(static_cast<unsigned>(x)) % 2 == 0) {
            stats.phase_error += rho.mat(x, x).real();
        }
    }
    return stats;
}

MeasurementStatistics measure_statistics(const QubitDensityMatrix& rho, int port_j, int num_ports) {
    std::vector<double> angles(rho.num_qubits);
    for (int k = 1; k <= rho.num_qubits; ++k) {
        angles[k - 1] = 2.0 * std::numbers::pi * (k - 1) * (port_j - 1) / num_ports;
    }
    return measure_statistics_with_angles(rho, angles);
}

ChannelStatistics oracle_statistics(const SetupParams& params) {
    params.validate();
    if (params.num_parties > kMaxOracleParties || params.num_ports > kMaxOraclePorts) {
        throw size_error("oracle_statistics: exact simulation guarded to N <= 6, M <= 8");
    }
    SparseFockState state = prepare_initial(params.num_parties, params.num_ports,
                                            params.vacuum_weight, params.phase_misalignment);
    state = apply_loss(state, params.transmittance);
    state = apply_polarization_misalignment(state, params.pol_misalignment);
    state = apply_multiport(state);

    const ClickProjection click = conditional_click_state(state, 1);
    const MeasurementStatistics meas = measure_statistics(click.state, 1, params.num_ports);
    double worst = 0.0;
    for (double v : meas.qber_per_pair) worst = std::max(worst, v);
    return ChannelStatistics{Probability(clamp_probability(click.prob, "oracle_statistics.p_j")),
                             Probability(clamp_probability(worst, "oracle_statistics.qber")),
                             Probability(clamp_probability(meas.phase_error, "oracle_statistics.q_z"))};
}

QubitDensityMatrix ideal_w_state(int num_parties) {
    const int dim = 1 << num_parties;
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(dim);
    for (int k = 0; k < num_parties; ++k) {
        w(1 << k) = 1.0 / std::sqrt(static_cast<double>(num_parties));
    }
    QubitDensityMatrix rho;
    rho.num_qubits = num_parties;
    rho.mat = w * w.adjoint();
    return rho;
}

} // namespace tfcka
