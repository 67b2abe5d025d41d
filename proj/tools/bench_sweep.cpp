// Times the oracle-verification sweep on the serial reference path and on
// the OpenMP path, and checks that both produce identical tables. The
// verification rows are exact Fock-space pipelines with no inner
// parallelism, so the comparison isolates the row-level parallelization.

#include "tfcka/sweep.hpp"

#include <chrono>
#include <cstdio>

namespace {

double seconds(const std::chrono::steady_clock::time_point& a,
               const std::chrono::steady_clock::time_point& b) {
    return std::chrono::duration<double>(b - a).count();
}

} // namespace

int main() {
    tfcka::SweepSpec spec;
    spec.command = tfcka::SweepCommand::verify_oracle;
    spec.n_values = {2, 3, 4};

    spec.jobs = 1;
    auto t0 = std::chrono::steady_clock::now();
    const tfcka::OracleVerification serial = tfcka::run_verify_oracle(spec);
    auto t1 = std::chrono::steady_clock::now();

    spec.jobs = 0;
    auto t2 = std::chrono::steady_clock::now();
    const tfcka::OracleVerification parallel = tfcka::run_verify_oracle(spec);
    auto t3 = std::chrono::steady_clock::now();

    const double ts = seconds(t0, t1);
    const double tp = seconds(t2, t3);
    std::printf("rows:     %zu\n", serial.table.rows.size());
    std::printf("serial:   %.3f s\n", ts);
    std::printf("parallel: %.3f s\n", tp);
    std::printf("speedup:  %.2fx\n", ts / tp);

    if (tfcka::to_csv(serial.table) != tfcka::to_csv(parallel.table)) {
        std::printf("MISMATCH: parallel output differs from serial reference\n");
        return 1;
    }
    if (!serial.all_within_tolerance) {
        std::printf("verification failed at %s\n", serial.first_violation.c_str());
        return 1;
    }
    std::printf("outputs identical\n");
    return 0;
}
