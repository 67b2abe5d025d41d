#ifndef TFCKA_SWEEP_HPP
#define TFCKA_SWEEP_HPP

#include "tfcka/optimizer.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tfcka {

enum class SweepCommand { asymptotic, finite, lmin, subgroup_opt, verify_oracle };
enum class OutputFormat { csv, json };

/// One sweep request: parameter ranges, defaults from the protocol's
/// reference configuration (p_d = 1e-9, 2% misalignment, eps_tot = 1e-8).
struct SweepSpec {
    SweepCommand command = SweepCommand::asymptotic;
    std::vector<int> n_values{2, 3, 5};
    int m_fixed = 0;  // 0 = M tracks N
    double loss_db_start = 0.0;
    double loss_db_stop = 60.0;
    double loss_db_step = 1.0;
    std::vector<double> rounds;  // L values for the finite sweep
    double dark_count_prob = 1e-9;
    double misalignment = 0.02;  // sin^2 of both misalignment angles
    double eps_tot = 1e-8;
    double fixed_q = -1.0;  // negative = optimize q
    double lmin_fraction = 0.1;
    OutputFormat format = OutputFormat::csv;
    std::string out_path;  // empty = stdout
    int jobs = 0;          // 0 = all processors, 1 = serial reference path

    void validate() const;  // throws std::invalid_argument (CLI exit code 2)

    /// SetupParams at one point; q defaults to 1 until the sweep fills it.
    SetupParams base_params(int n, double loss_db) const;
    int ports_for(int n) const { return m_fixed > 0 ? m_fixed : n; }
};

/// Schema-stable tabular result; floats serialized with 17 significant digits.
struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

using RowFn = std::function<std::vector<double>(std::size_t)>;

/// Serial reference evaluation of rows [0, count); kept for testing and as
/// the baseline of the benchmark.
std::vector<std::vector<double>> evaluate_rows_serial(std::size_t count, const RowFn& fn);

/// OpenMP evaluation; rows land at their index, so output order and content
/// are identical to the serial path.
std::vector<std::vector<double>> evaluate_rows_parallel(std::size_t count, const RowFn& fn,
                                                        int jobs);

SweepTable run_sweep_asymptotic(const SweepSpec& spec);
SweepTable run_sweep_finite(const SweepSpec& spec);
SweepTable run_lmin(const SweepSpec& spec);
SweepTable run_subgroup_opt(const SweepSpec& spec);

struct OracleVerification {
    SweepTable table;
    bool all_within_tolerance = false;
    std::string first_violation;  // empty when clean
};

/// Analytic vs exact-oracle comparison over the default verification grid;
/// tolerance 1e-10 on each statistic.
OracleVerification run_verify_oracle(const SweepSpec& spec);

std::string to_csv(const SweepTable& table);
std::string to_json(const SweepTable& table);

/// Writes to spec.out_path atomically (temp file + rename), or stdout.
void write_output(const SweepSpec& spec, const SweepTable& table);

/// Dispatches a validated spec. Returns 0 on success, 1 on oracle
/// verification failure.
int run_command(const SweepSpec& spec);

} // namespace tfcka

#endif
