#include "tfcka/sweep.hpp"

#include "tfcka/errors.hpp"
#include "tfcka/fock_oracle.hpp"

#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

namespace tfcka {

namespace {

constexpr double kOracleTolerance = 1e-10;

double misalignment_angle(double fraction) {
    return std::asin(std::sqrt(fraction));
}

std::vector<double> loss_grid(const SweepSpec& spec) {
    std::vector<double> grid;
    for (double loss = spec.loss_db_start; loss <= spec.loss_db_stop + 1e-9;
         loss += spec.loss_db_step) {
        grid.push_back(loss);
    }
    return grid;
}

std::vector<std::vector<double>> evaluate_rows(const SweepSpec& spec, std::size_t count,
                                               const RowFn& fn) {
    if (spec.jobs == 1) return evaluate_rows_serial(count, fn);
    return evaluate_rows_parallel(count, fn, spec.jobs);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void SweepSpec::validate() const {
    if (n_values.empty()) throw std::invalid_argument("sweep: empty N list");
    for (int n : n_values) {
        if (n < 2) throw std::invalid_argument("sweep: N must be at least 2");
        if (m_fixed > 0 && m_fixed < n) {
            throw std::invalid_argument("sweep: M must be at least N");
        }
        if (command == SweepCommand::verify_oracle && (n > 6 || ports_for(n) > 8)) {
            throw std::invalid_argument("sweep: oracle verification guarded to N <= 6, M <= 8");
        }
    }
    if (loss_db_step <= 0.0) throw std::invalid_argument("sweep: loss step must be positive");
    if (loss_db_stop < loss_db_start) throw std::invalid_argument("sweep: empty loss range");
    if (command == SweepCommand::finite && rounds.empty()) {
        throw std::invalid_argument("sweep: finite sweep needs a rounds list");
    }
    if (!(misalignment >= 0.0 && misalignment <= 1.0)) {
        throw std::invalid_argument("sweep: misalignment must lie in [0,1]");
    }
    if (!(eps_tot > 0.0)) throw std::invalid_argument("sweep: eps_tot must be positive");
    if (fixed_q >= 0.0 && fixed_q > 1.0) throw std::invalid_argument("sweep: q outside [0,1]");
    if (!(lmin_fraction > 0.0 && lmin_fraction < 1.0)) {
        throw std::invalid_argument("sweep: lmin fraction must lie in (0,1)");
    }
    if (jobs < 0) throw std::invalid_argument("sweep: jobs must be nonnegative");
}

SetupParams SweepSpec::base_params(int n, double loss_db) const {
    SetupParams params;
    params.num_parties = n;
    params.num_ports = ports_for(n);
    params.vacuum_weight = Probability(1.0);
    params.transmittance = Probability(loss_db_to_transmittance(loss_db));
    params.pol_misalignment = misalignment_angle(misalignment);
    params.phase_misalignment = misalignment_angle(misalignment);
    params.dark_count_prob = Probability(dark_count_prob);
    return params;
}

std::vector<std::vector<double>> evaluate_rows_serial(std::size_t count, const RowFn& fn) {
    std::vector<std::vector<double>> rows(count);
    for (std::size_t i = 0; i < count; ++i) rows[i] = fn(i);
    return rows;
}

std::vector<std::vector<double>> evaluate_rows_parallel(std::size_t count, const RowFn& fn,
                                                        int jobs) {
    std::vector<std::vector<double>> rows(count);
#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
    #pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
        rows[i] = fn(static_cast<std::size_t>(i));
    }
    return rows;
}

SweepTable run_sweep_asymptotic(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> losses = loss_grid(spec);
    SweepTable table;
    table.columns = {"n", "m", "loss_db", "t", "q_star", "p_j", "qber", "q_z", "rate",
                     "direct_bound"};

    const std::size_t count = spec.n_values.size() * losses.size();
    table.rows = evaluate_rows(spec, count, [&](std::size_t idx) {
        const int n = spec.n_values[idx / losses.size()];
        const double loss = losses[idx % losses.size()];
        SetupParams base = spec.base_params(n, loss);
        RateResult result;
        if (spec.fixed_q >= 0.0) {
            base.vacuum_weight = Probability(spec.fixed_q);
            result = asymptotic_rate(base);
            result.meta["q"] = spec.fixed_q;
        } else {
            result = optimize_q_asymptotic(base);
        }
        const double t = base.transmittance;
        const double bound = t < 1.0 ? direct_transmission_bound(n, t).rate
                                     : std::numeric_limits<double>::infinity();
        return std::vector<double>{static_cast<double>(n),
                                   static_cast<double>(base.num_ports),
                                   loss,
                                   t,
                                   result.meta.at("q"),
                                   result.meta.at("p_j"),
                                   result.meta.at("qber"),
                                   result.meta.at("q_z"),
                                   result.rate,
                                   bound};
    });
    return table;
}

SweepTable run_sweep_finite(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> losses = loss_grid(spec);
    SweepTable table;
    table.columns = {"n", "m", "loss_db", "rounds", "gross_rate", "net_rate", "q", "p_pe",
                     "eps_x", "eps_z", "eps_ec", "eps_pa"};

    const std::size_t per_n = losses.size() * spec.rounds.size();
    const std::size_t count = spec.n_values.size() * per_n;
    table.rows = evaluate_rows(spec, count, [&](std::size_t idx) {
        const int n = spec.n_values[idx / per_n];
        const std::size_t rest = idx % per_n;
        const double loss = losses[rest / spec.rounds.size()];
        const double rounds = spec.rounds[rest % spec.rounds.size()];
        const SetupParams base = spec.base_params(n, loss);
        std::vector<double> row{static_cast<double>(n), static_cast<double>(base.num_ports),
                                loss, rounds};
        try {
            const RateResult result =
                optimize_finite_key(base, std::llround(rounds), spec.eps_tot);
            row.insert(row.end(), {result.rate, result.meta.at("net_rate"),
                                   result.meta.at("q"), result.meta.at("p_pe"),
                                   result.meta.at("eps_x"), result.meta.at("eps_z"),
                                   result.meta.at("eps_ec"), result.meta.at("eps_pa")});
        } catch (const infeasible_error&) {
            row.insert(row.end(), {0.0, 0.0, std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN()});
        }
        return row;
    });
    return table;
}

SweepTable run_lmin(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> losses = loss_grid(spec);
    SweepTable table;
    table.columns = {"n", "m", "loss_db", "asymptotic_rate", "fraction", "l_min"};

    const std::size_t count = spec.n_values.size() * losses.size();
    table.rows = evaluate_rows(spec, count, [&](std::size_t idx) {
        const int n = spec.n_values[idx / losses.size()];
        const double loss = losses[idx % losses.size()];
        const SetupParams base = spec.base_params(n, loss);
        double asym = 0.0;
        double lmin = std::numeric_limits<double>::quiet_NaN();
        try {
            asym = optimize_q_asymptotic(base).rate;
            lmin = static_cast<double>(minimum_rounds(base, spec.lmin_fraction, spec.eps_tot));
        } catch (const infeasible_error&) {
            // leave NaN
        }
        return std::vector<double>{static_cast<double>(n), static_cast<double>(base.num_ports),
                                   loss, asym, spec.lmin_fraction, lmin};
    });
    return table;
}

SweepTable run_subgroup_opt(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> losses = loss_grid(spec);
    SweepTable table;
    table.columns = {"n", "m", "loss_db", "q", "r_opt", "best_group_size", "full_group_rate",
                     "bipartite_rate", "direct_bound"};

    const std::size_t count = spec.n_values.size() * losses.size();
    table.rows = evaluate_rows(spec, count, [&](std::size_t idx) {
        const int n = spec.n_values[idx / losses.size()];
        const double loss = losses[idx % losses.size()];
        const SetupParams outer = spec.base_params(n, loss);

        // Subgroups reuse the full setup (same M-port splitter).
        const auto group_rate = [&](int size) {
            SetupParams params = outer;
            params.num_parties = size;
            if (spec.fixed_q >= 0.0) {
                params.vacuum_weight = Probability(spec.fixed_q);
                return asymptotic_rate(params).rate;
            }
            return optimize_q_asymptotic(params).rate;
        };
        const RateResult opt = subgroup_optimized_rate(n, group_rate);
        const double t = outer.transmittance;
        const double bound = t < 1.0 ? direct_transmission_bound(n, t).rate
                                     : std::numeric_limits<double>::infinity();
        return std::vector<double>{static_cast<double>(n),
                                   static_cast<double>(outer.num_ports),
                                   loss,
                                   spec.fixed_q,
                                   opt.rate,
                                   opt.meta.at("group_size"),
                                   group_rate(n),
                                   group_rate(2) / (n - 1),
                                   bound};
    });
    return table;
}

OracleVerification run_verify_oracle(const SweepSpec& spec) {
    spec.validate();
    const double angle2 = misalignment_angle(0.02);
    const std::vector<double> qs{0.5, 0.9, 0.99, 1.0};
    const std::vector<double> ts{0.1, 0.5, 0.9};
    const std::vector<double> angles{0.0, angle2, 0.3};

    struct Point { int n, m; double q, t, theta, phi; };
    std::vector<Point> points;
    for (int n : spec.n_values) {
        const int m_lo = spec.m_fixed > 0 ? spec.m_fixed : n;
        const int m_hi = spec.m_fixed > 0 ? spec.m_fixed : std::max(n, 6);
        for (int m = m_lo; m <= m_hi; ++m) {
            for (double q : qs) {
                for (double t : ts) {
                    for (double theta : angles) {
                        for (double phi : angles) {
                            points.push_back({n, m, q, t, theta, phi});
                        }
                    }
                }
            }
        }
    }

    OracleVerification verification;
    verification.table.columns = {
        "n", "m", "q", "t", "theta", "phi",
        "pj_analytic", "pj_oracle", "abs_diff_pj",
        "qber_analytic", "qber_oracle", "abs_diff_qber",
        "qz_analytic", "qz_oracle", "abs_diff_qz"};

    verification.table.rows = evaluate_rows(spec, points.size(), [&](std::size_t idx) {
        const Point& pt = points[idx];
        SetupParams params;
        params.num_parties = pt.n;
        params.num_ports = pt.m;
        params.vacuum_weight = Probability(pt.q);
        params.transmittance = Probability(pt.t);
        params.pol_misalignment = pt.theta;
        params.phase_misalignment = pt.phi;
        params.dark_count_prob = Probability(0.0);

        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> row{static_cast<double>(pt.n), static_cast<double>(pt.m),
                                pt.q, pt.t, pt.theta, pt.phi};
        const double pj = single_click_probability(params);
        if (pt.q >= 1.0) {
            // No photon is ever emitted; conditional statistics are undefined.
            row.insert(row.end(), {pj, 0.0, std::abs(pj), nan, nan, nan, nan, nan, nan});
            return row;
        }
        const ChannelStatistics oracle = oracle_statistics(params);
        const double qb = qber(params);
        const double qz = phase_error_rate(params);
        row.insert(row.end(), {pj, oracle.click_prob.value(), std::abs(pj - oracle.click_prob),
                               qb, oracle.qber.value(), std::abs(qb - oracle.qber),
                               qz, oracle.phase_error.value(), std::abs(qz - oracle.phase_error)});
        return row;
    });

    verification.all_within_tolerance = true;
    for (const auto& row : verification.table.rows) {
        for (std::size_t c = 8; c < row.size(); c += 3) {
            const double diff = row[c];
            if (!std::isnan(diff) && diff > kOracleTolerance) {
                verification.all_within_tolerance = false;
                if (verification.first_violation.empty()) {
                    verification.first_violation =
                        "n=" + format_double(row[0]) + " m=" + format_double(row[1])
                        + " q=" + format_double(row[2]) + " t=" + format_double(row[3])
                        + " theta=" + format_double(row[4]) + " phi=" + format_double(row[5])
                        + " diff=" + format_double(diff);
                }
            }
        }
    }
    return verification;
}

std::string to_csv(const SweepTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const SweepTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj;
        for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = row[c];
        rows.push_back(obj);
    }
    return rows.dump(2) + "\n";
}

void write_output(const SweepSpec& spec, const SweepTable& table) {
    const std::string payload =
        spec.format == OutputFormat::csv ? to_csv(table) : to_json(table);
    if (spec.out_path.empty()) {
        std::cout << payload;
        return;
    }
    // Never leave a partial file behind.
    const std::string tmp = spec.out_path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + tmp);
        out << payload;
    }
    if (std::rename(tmp.c_str(), spec.out_path.c_str()) != 0) {
        throw std::runtime_error("cannot rename output file to: " + spec.out_path);
    }
}

int run_command(const SweepSpec& spec) {
    switch (spec.command) {
        case SweepCommand::asymptotic:
            write_output(spec, run_sweep_asymptotic(spec));
            return 0;
        case SweepCommand::finite:
            write_output(spec, run_sweep_finite(spec));
            return 0;
        case SweepCommand::lmin:
            write_output(spec, run_lmin(spec));
            return 0;
        case SweepCommand::subgroup_opt:
            write_output(spec, run_subgroup_opt(spec));
            return 0;
        case SweepCommand::verify_oracle: {
            const OracleVerification verification = run_verify_oracle(spec);
            write_output(spec, verification.table);
            if (!verification.all_within_tolerance) {
                std::cerr << "oracle verification failed at " << verification.first_violation
                          << "\n";
                return 1;
            }
            return 0;
        }
    }
    return 2;
}

} // namespace tfcka
