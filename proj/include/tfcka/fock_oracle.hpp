#ifndef TFCKA_FOCK_ORACLE_HPP
#define TFCKA_FOCK_ORACLE_HPP

#include "tfcka/channel_model.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

namespace tfcka {

/// Fixed bookkeeping of the optical modes for N parties and M output ports.
/// Occupation vectors have length 2M + 3N, in the order
///   port1_P, port1_Pperp, ..., portM_P, portM_Pperp,
///   loss_1, ..., loss_N,
///   in1_P, ..., inN_P, in1_Pperp, ..., inN_Pperp.
/// The trailing input block is only populated before the multiport stage, so
/// post-multiport states coincide with the documented 2M+N prefix.
struct ModeLayout {
    int num_parties = 0;  // N
    int num_ports = 0;    // M

    int size() const { return 2 * num_ports + 3 * num_parties; }
    int port_mode(int j, bool perp) const { return 2 * (j - 1) + (perp ? 1 : 0); }
    int loss_mode(int k) const { return 2 * num_ports + (k - 1); }
    int input_mode(int k, bool perp) const {
        return 2 * num_ports + num_parties + (perp ? num_parties : 0) + (k - 1);
    }
};

/// One basis term: the parties' qubit bits (bit k-1 = party k) plus the
/// occupation of every optical mode.
struct FockTerm {
    std::uint32_t qubits = 0;
    std::vector<std::uint8_t> occupations;

    friend bool operator<(const FockTerm& a, const FockTerm& b) {
        if (a.qubits != b.qubits) return a.qubits < b.qubits;
        return a.occupations < b.occupations;
    }
};

/// Exact joint state of N qubits and all optical modes, stored sparsely.
class SparseFockState {
public:
    SparseFockState() = default;
    explicit SparseFockState(ModeLayout layout) : layout_(layout) {}

    const ModeLayout& layout() const { return layout_; }
    const std::map<FockTerm, std::complex<double>>& terms() const { return amps_; }

    void add(const FockTerm& term, std::complex<double> amplitude);
    double norm_squared() const;
    std::size_t size() const { return amps_.size(); }

    /// Drops terms with |amplitude| below the threshold.
    void prune(double threshold = 1e-15);

    /// Line-oriented debug dump: `bitstring | occupation-csv | re | im`.
    void dump(std::ostream& out) const;

private:
    ModeLayout layout_;
    std::map<FockTerm, std::complex<double>> amps_;
};

/// N-qubit density matrix, basis index = qubit bitstring (bit k-1 = party k).
struct QubitDensityMatrix {
    int num_qubits = 0;
    Eigen::MatrixXcd mat;

    /// Throws std::logic_error unless Hermitian (1e-12), PSD (min eigenvalue
    /// >= -1e-10) and unit trace (1e-12).
    void check_valid() const;
};

struct ClickProjection {
    double prob = 0.0;
    QubitDensityMatrix state;
};

struct MeasurementStatistics {
    std::vector<double> qber_per_pair;  // entry i-2 = Pr[A_1 != A_i], i = 2..N
    double phase_error = 0.0;           // Pr[prod Z = +1]
};

/// |Phi_1>: per-party superposition of (qubit 0, vacuum) and (qubit 1, one
/// photon), with phase mismatch 0 for party 1 and phi for the rest.
SparseFockState prepare_initial(int num_parties, int num_ports, double q, double phi);

/// Channel loss: a_k -> sqrt(t) a_k + sqrt(1-t) l_k on every input mode.
SparseFockState apply_loss(const SparseFockState& state, double t);

/// Polarization rotation by theta for parties k >= 2; party 1 is the reference.
SparseFockState apply_polarization_misalignment(const SparseFockState& state, double theta);

/// Bell-multiport beam splitter: the discrete-Fourier unitary
/// U_{kj} = exp(i 2 pi (k-1)(j-1)/M)/sqrt(M), applied per polarization.
SparseFockState apply_multiport(const SparseFockState& state);

/// Projects on >=1 photon at port j and vacuum at every other port, then
/// traces out all optical modes. Returns (p_j, normalized qubit state).
ClickProjection conditional_click_state(const SparseFockState& state, int port_j);

/// Projects on vacuum at every output port.
ClickProjection no_click_conditional_state(const SparseFockState& state);

/// Probability that two or more output ports carry photons.
double multi_click_probability(const SparseFockState& state);

/// QBER per pair and phase-error rate with the protocol's click-dependent
/// measurement angles phi_k = 2 pi (k-1)(j-1)/M.
MeasurementStatistics measure_statistics(const QubitDensityMatrix& rho, int port_j, int num_ports);

/// Same, with arbitrary per-party measurement angles (angles[k-1] for party k).
MeasurementStatistics measure_statistics_with_angles(const QubitDensityMatrix& rho,
                                                     const std::vector<double>& angles);

/// Full pipeline on one parameter point; QBER reported as the max over pairs.
/// Guarded to N <= 6, M <= 8.
ChannelStatistics oracle_statistics(const SetupParams& params);

/// The exact |W_N><W_N| density matrix.
QubitDensityMatrix ideal_w_state(int num_parties);

} // namespace tfcka

#endif
