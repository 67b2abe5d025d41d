// tfcka: rate sweeps for single-photon-interference conference key agreement.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or validation error.

#include "tfcka/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using tfcka::OutputFormat;
using tfcka::SweepCommand;
using tfcka::SweepSpec;

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stoi(item));
    if (values.empty()) throw std::invalid_argument("empty list: " + text);
    return values;
}

void parse_loss_range(const std::string& text, SweepSpec& spec) {
    double a = 0.0, b = 0.0, step = 1.0;
    char c1 = 0, c2 = 0;
    std::stringstream ss(text);
    if (ss >> a >> c1 >> b >> c2 >> step && c1 == ':' && c2 == ':') {
        spec.loss_db_start = a;
        spec.loss_db_stop = b;
        spec.loss_db_step = step;
        return;
    }
    // A single value means one point.
    std::stringstream single(text);
    if (single >> a && single.eof()) {
        spec.loss_db_start = spec.loss_db_stop = a;
        spec.loss_db_step = 1.0;
        return;
    }
    throw std::invalid_argument("bad loss range, expected start:stop:step, got " + text);
}

std::vector<double> parse_rounds(const std::string& text) {
    // Either a comma list of L values or start:stop:log10 for one value per
    // decade (endpoints included).
    const auto log_pos = text.find(":log10");
    if (log_pos != std::string::npos && text.rfind(":log10") + 6 == text.size()) {
        const std::string range = text.substr(0, log_pos);
        const auto sep = range.find(':');
        if (sep == std::string::npos) {
            throw std::invalid_argument("bad rounds range: " + text);
        }
        const double lo = std::stod(range.substr(0, sep));
        const double hi = std::stod(range.substr(sep + 1));
        if (!(lo > 0.0 && hi >= lo)) {
            throw std::invalid_argument("bad rounds range: " + text);
        }
        std::vector<double> values;
        for (double v = lo; v <= hi * (1.0 + 1e-12); v *= 10.0) values.push_back(v);
        return values;
    }
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    if (values.empty()) throw std::invalid_argument("empty rounds list: " + text);
    return values;
}

// Options shared by every subcommand, kept as raw strings so the config file
// and the flags go through the same parsing.
struct RawOptions {
    std::map<std::string, std::string> values;

    void set_default(const std::string& key, const std::string& value) {
        values.emplace(key, value);
    }
    const std::string* get(const std::string& key) const {
        const auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    }
};

void load_config_file(const char* path, RawOptions& raw) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(std::string("cannot read config file: ") + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) raw.values[key] = value;
    }
}

SweepSpec build_spec(SweepCommand command, const RawOptions& raw) {
    SweepSpec spec;
    spec.command = command;
    if (command == SweepCommand::verify_oracle) spec.n_values = {2, 3, 4};

    if (const auto* v = raw.get("n")) spec.n_values = parse_int_list(*v);
    if (const auto* v = raw.get("m")) {
        spec.m_fixed = (*v == "auto") ? 0 : std::stoi(*v);
    }
    if (const auto* v = raw.get("loss-db")) parse_loss_range(*v, spec);
    if (const auto* v = raw.get("rounds")) spec.rounds = parse_rounds(*v);
    if (const auto* v = raw.get("pd")) spec.dark_count_prob = std::stod(*v);
    if (const auto* v = raw.get("misalign")) spec.misalignment = std::stod(*v);
    if (const auto* v = raw.get("eps-tot")) spec.eps_tot = std::stod(*v);
    if (const auto* v = raw.get("q")) {
        spec.fixed_q = (*v == "auto") ? -1.0 : std::stod(*v);
    }
    if (const auto* v = raw.get("lmin-fraction")) spec.lmin_fraction = std::stod(*v);
    if (const auto* v = raw.get("format")) {
        if (*v == "csv") {
            spec.format = OutputFormat::csv;
        } else if (*v == "json") {
            spec.format = OutputFormat::json;
        } else {
            throw std::invalid_argument("bad format, expected csv or json: " + *v);
        }
    }
    if (const auto* v = raw.get("out")) spec.out_path = *v;
    if (const auto* v = raw.get("jobs")) spec.jobs = std::stoi(*v);
    return spec;
}

void add_common_options(CLI::App* sub, RawOptions& raw) {
    const auto capture = [&raw](const std::string& key) {
        return [&raw, key](const std::string& value) { raw.values[key] = value; };
    };
    sub->add_option_function<std::string>("--n", capture("n"),
                                          "comma-separated party counts, e.g. 2,3,5");
    sub->add_option_function<std::string>("--m", capture("m"),
                                          "beam splitter ports: auto (M = N) or a fixed count");
    sub->add_option_function<std::string>("--loss-db", capture("loss-db"),
                                          "per-channel loss sweep start:stop:step in dB");
    sub->add_option_function<std::string>("--rounds", capture("rounds"),
                                          "round counts: list or start:stop:log10");
    sub->add_option_function<std::string>("--pd", capture("pd"),
                                          "dark count probability per detector");
    sub->add_option_function<std::string>("--misalign", capture("misalign"),
                                          "misalignment as sin^2 of both angles");
    sub->add_option_function<std::string>("--eps-tot", capture("eps-tot"),
                                          "total security parameter");
    sub->add_option_function<std::string>("--q", capture("q"),
                                          "vacuum weight: auto (optimize) or a fixed value");
    sub->add_option_function<std::string>("--lmin-fraction", capture("lmin-fraction"),
                                          "asymptotic-rate fraction targeted by lmin");
    sub->add_option_function<std::string>("--format", capture("format"), "csv or json");
    sub->add_option_function<std::string>("--out", capture("out"),
                                          "output path (default stdout)");
    sub->add_option_function<std::string>("--jobs", capture("jobs"),
                                          "worker threads, 0 = all, 1 = serial");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conference key agreement rate sweeps"};
    app.require_subcommand(1);

    RawOptions raw;
    if (const char* config = std::getenv("TFCKA_CONFIG")) {
        try {
            load_config_file(config, raw);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }

    const std::vector<std::pair<std::string, SweepCommand>> commands{
        {"sweep-asymptotic", SweepCommand::asymptotic},
        {"sweep-finite", SweepCommand::finite},
        {"lmin", SweepCommand::lmin},
        {"subgroup-opt", SweepCommand::subgroup_opt},
        {"verify-oracle", SweepCommand::verify_oracle},
    };
    for (const auto& [name, command] : commands) {
        CLI::App* sub = app.add_subcommand(name);
        add_common_options(sub, raw);
        sub->callback([]() {});
        sub->parse_complete_callback([]() {});
        (void)command;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    SweepCommand command = SweepCommand::asymptotic;
    for (const auto& [name, cmd] : commands) {
        if (app.got_subcommand(name)) command = cmd;
    }

    try {
        SweepSpec spec = build_spec(command, raw);
        if (command == SweepCommand::finite && spec.rounds.empty()) {
            spec.rounds = parse_rounds("1e7:1e12:log10");
        }
        return tfcka::run_command(spec);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
