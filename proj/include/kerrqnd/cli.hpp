// Copyright 2026 The kerrqnd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: configuration from a flat `key = value` file and/or
// flags (flags win), execution through run_shots or the Fock oracle, and
// CSV/JSON result tables.
//
// Exit codes: 0 success, 1 internal error (including an unwritable output or
// a failed oracle validation), 2 configuration error.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "kerrqnd/analysis.hpp"
#include "kerrqnd/fock_oracle.hpp"
#include "kerrqnd/gates.hpp"
#include "kerrqnd/measurement.hpp"

namespace kerrqnd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;

inline constexpr double kOracleMaxAlpha = 3.0;
inline constexpr double kOracleDensityTolerance = 1e-6;
inline constexpr double kOracleFidelityTolerance = 1e-9;

inline constexpr std::string_view kCsvHeader =
    "experiment,alpha,theta,shots,seed,x0,xd,p_error_analytic,error_rate,error_ci,mean_fidelity";

struct ConfigError : std::runtime_error {
    ConfigError(std::string key_name, const std::string &message)
        : std::runtime_error(key_name + ": " + message), key(std::move(key_name)) {}
    std::string key;
};

enum class OutputFormat { csv, json };

struct Grid {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;

    std::vector<double> points() const {
        std::vector<double> out;
        for (int i = 0; i < count; ++i) {
            out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
        }
        return out;
    }
};

struct ExperimentConfig {
    std::string experiment;
    double alpha = 0.0;
    double theta = 0.0;
    std::int64_t shots = 10000;
    std::uint64_t seed = 42;
    std::vector<AmplitudePair> inputs;
    std::optional<Grid> grid_alpha;
    std::optional<Grid> grid_theta;
    Experiment sweep_of = Experiment::cnot;
    std::string output_path = "-";
    OutputFormat format = OutputFormat::csv;
};

inline const std::vector<std::string> &known_keys() {
    static const std::vector<std::string> keys = {"experiment", "alpha",      "theta",  "shots",
                                                  "seed",       "input",      "output", "format",
                                                  "grid-alpha", "grid-theta", "sweep-of"};
    return keys;
}

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

/// Reads `key = value` lines; `#` starts a comment.
inline std::map<std::string, std::string> read_config_text(std::istream &in) {
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config", "line " + std::to_string(line_no) + " is not `key = value`");
        }
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            throw ConfigError(key, "unknown key");
        }
        out[key] = value;
    }
    return out;
}

namespace detail {

inline double parse_real(const std::string &key, const std::string &text) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::exception &) {
        throw ConfigError(key, "not a finite number: '" + text + "'");
    }
}

inline std::int64_t parse_integer(const std::string &key, const std::string &text) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::exception &) {
        throw ConfigError(key, "not an integer: '" + text + "'");
    }
}

inline std::vector<std::string> split(const std::string &text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        parts.push_back(trim(item));
    }
    return parts;
}

/// "re" or "re:im".
inline Complex parse_amplitude(const std::string &key, const std::string &text) {
    auto parts = split(text, ':');
    if (parts.size() == 1) {
        return parse_real(key, parts[0]);
    }
    if (parts.size() == 2) {
        return {parse_real(key, parts[0]), parse_real(key, parts[1])};
    }
    throw ConfigError(key, "amplitude must be `re` or `re:im`, got '" + text + "'");
}

/// "c0,c1;d0,d1".
inline std::vector<AmplitudePair> parse_inputs(const std::string &key, const std::string &text) {
    std::vector<AmplitudePair> out;
    for (const auto &pair : split(text, ';')) {
        auto amps = split(pair, ',');
        if (amps.size() != 2) {
            throw ConfigError(key, "each qubit needs two amplitudes `c0,c1`, got '" + pair + "'");
        }
        Complex c0 = parse_amplitude(key, amps[0]);
        Complex c1 = parse_amplitude(key, amps[1]);
        if (std::abs(std::norm(c0) + std::norm(c1) - 1.0) > 1e-9) {
            throw ConfigError(key, "qubit amplitudes '" + pair + "' are not normalized");
        }
        // Renormalize away the printing error of decimal inputs.
        double n = std::sqrt(std::norm(c0) + std::norm(c1));
        out.emplace_back(c0 / n, c1 / n);
    }
    if (out.size() != 2) {
        throw ConfigError(key, "exactly two qubit states are required");
    }
    return out;
}

/// "lo:hi:n".
inline Grid parse_grid(const std::string &key, const std::string &text) {
    auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw ConfigError(key, "grid must be `lo:hi:n`, got '" + text + "'");
    }
    Grid g{parse_real(key, parts[0]), parse_real(key, parts[1]), static_cast<int>(parse_integer(key, parts[2]))};
    if (g.count < 1) {
        throw ConfigError(key, "grid needs at least one point");
    }
    return g;
}

inline void check_alpha(const std::string &key, double alpha) {
    if (alpha < 0.0) {
        throw ConfigError(key, "alpha must be >= 0");
    }
}

inline void check_theta(const std::string &key, double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw ConfigError(key, "theta must lie in [0, pi]");
    }
}

}  // namespace detail

/// Turns merged raw key/value settings into a validated config.
inline ExperimentConfig build_config(const std::map<std::string, std::string> &raw) {
    for (const auto &[key, value] : raw) {
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            throw ConfigError(key, "unknown key");
        }
    }
    auto get = [&raw](const std::string &key) -> std::optional<std::string> {
        auto it = raw.find(key);
        return it == raw.end() ? std::nullopt : std::optional<std::string>(it->second);
    };

    ExperimentConfig cfg;
    auto experiment = get("experiment");
    if (!experiment) {
        throw ConfigError("experiment", "required");
    }
    cfg.experiment = *experiment;
    static const std::vector<std::string> experiments = {"parity", "entangler", "entangler45",
                                                         "cnot",   "sweep",     "validate-oracle"};
    if (std::find(experiments.begin(), experiments.end(), cfg.experiment) == experiments.end()) {
        throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "'");
    }
    const bool sweep = cfg.experiment == "sweep";

    if (auto v = get("shots")) {
        cfg.shots = detail::parse_integer("shots", *v);
        if (cfg.shots < 1) {
            throw ConfigError("shots", "must be >= 1");
        }
    }
    if (auto v = get("seed")) {
        std::int64_t s = detail::parse_integer("seed", *v);
        if (s < 0) {
            throw ConfigError("seed", "must be >= 0");
        }
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (auto v = get("format")) {
        if (*v == "csv") {
            cfg.format = OutputFormat::csv;
        } else if (*v == "json") {
            cfg.format = OutputFormat::json;
        } else {
            throw ConfigError("format", "must be csv or json");
        }
    }
    if (auto v = get("output")) {
        if (v->empty()) {
            throw ConfigError("output", "empty path");
        }
        cfg.output_path = *v;
    }
    if (auto v = get("alpha")) {
        cfg.alpha = detail::parse_real("alpha", *v);
        detail::check_alpha("alpha", cfg.alpha);
    } else if (!sweep) {
        throw ConfigError("alpha", "required");
    }
    if (auto v = get("theta")) {
        cfg.theta = detail::parse_real("theta", *v);
        detail::check_theta("theta", cfg.theta);
    } else if (!sweep) {
        throw ConfigError("theta", "required");
    }
    if (auto v = get("grid-alpha")) {
        cfg.grid_alpha = detail::parse_grid("grid-alpha", *v);
        detail::check_alpha("grid-alpha", std::min(cfg.grid_alpha->lo, cfg.grid_alpha->hi));
    }
    if (auto v = get("grid-theta")) {
        cfg.grid_theta = detail::parse_grid("grid-theta", *v);
        detail::check_theta("grid-theta", cfg.grid_theta->lo);
        detail::check_theta("grid-theta", cfg.grid_theta->hi);
    }
    if (auto v = get("sweep-of")) {
        try {
            cfg.sweep_of = parse_experiment(*v);
        } catch (const ValidationError &e) {
            throw ConfigError("sweep-of", e.what());
        }
    }
    if (sweep && (!cfg.grid_alpha || !cfg.grid_theta)) {
        throw ConfigError(cfg.grid_alpha ? "grid-theta" : "grid-alpha", "sweep requires both grid-alpha and grid-theta");
    }
    if (cfg.experiment == "validate-oracle" && cfg.alpha > kOracleMaxAlpha) {
        throw ConfigError("alpha", "validate-oracle supports alpha <= 3");
    }

    const double h = std::numbers::sqrt2 / 2.0;
    const bool cnot_like = cfg.experiment == "cnot" || (sweep && cfg.sweep_of == Experiment::cnot);
    if (auto v = get("input")) {
        cfg.inputs = detail::parse_inputs("input", *v);
    } else if (cnot_like) {
        cfg.inputs = {{h, h}, {1.0, 0.0}};
    } else {
        cfg.inputs = {{h, h}, {h, h}};
    }
    return cfg;
}

/// Parses flags (and an optional --config file) into a config. Throws
/// ConfigError for bad values, CLI::ParseError for malformed flags.
inline ExperimentConfig parse_config(int argc, const char *const *argv) {
    CLI::App app{"Weak cross-Kerr parity detector, entangler and CNOT simulator"};
    std::optional<std::string> config_path;
    std::map<std::string, std::optional<std::string>> flags;
    for (const auto &key : known_keys()) {
        flags[key] = std::nullopt;
    }
    app.add_option("--config", config_path, "flat `key = value` configuration file");
    app.add_option("--experiment", flags["experiment"], "parity|entangler|entangler45|cnot|sweep|validate-oracle");
    app.add_option("--alpha", flags["alpha"], "probe amplitude");
    app.add_option("--theta", flags["theta"], "Kerr phase per photon, radians in [0, pi]");
    app.add_option("--shots", flags["shots"], "number of shots (default 10000)");
    app.add_option("--seed", flags["seed"], "base seed (default 42)");
    app.add_option("--input", flags["input"], "input qubits as `c0,c1;d0,d1`, amplitudes `re` or `re:im`");
    app.add_option("--output", flags["output"], "output path, `-` for stdout (default)");
    app.add_option("--format", flags["format"], "csv|json (default csv)");
    app.add_option("--grid-alpha", flags["grid-alpha"], "sweep grid `lo:hi:n`");
    app.add_option("--grid-theta", flags["grid-theta"], "sweep grid `lo:hi:n`");
    app.add_option("--sweep-of", flags["sweep-of"], "experiment run at each sweep point (default cnot)");
    app.parse(argc, argv);

    std::map<std::string, std::string> raw;
    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) {
            throw ConfigError("config", "cannot open '" + *config_path + "'");
        }
        raw = read_config_text(in);
    }
    for (const auto &[key, value] : flags) {
        if (value) {
            raw[key] = *value;
        }
    }
    return build_config(raw);
}

struct ResultRow {
    std::string experiment;
    double alpha = 0.0;
    double theta = 0.0;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    double x0 = 0.0;
    double xd = 0.0;
    double p_error_analytic = 0.0;
    double error_rate = 0.0;
    double error_ci = 0.0;
    double mean_fidelity = 0.0;
};

inline std::string format_real(double v) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.precision(17);
    out << v;
    return out.str();
}

inline std::string to_csv(const std::vector<ResultRow> &rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto &r : rows) {
        out += r.experiment + ',' + format_real(r.alpha) + ',' + format_real(r.theta) + ',' + std::to_string(r.shots) +
               ',' + std::to_string(r.seed) + ',' + format_real(r.x0) + ',' + format_real(r.xd) + ',' +
               format_real(r.p_error_analytic) + ',' + format_real(r.error_rate) + ',' + format_real(r.error_ci) +
               ',' + format_real(r.mean_fidelity) + '\n';
    }
    return out;
}

inline std::string to_json(const std::vector<ResultRow> &rows) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &r = rows[i];
        out += "  {\"experiment\": \"" + r.experiment + "\", \"alpha\": " + format_real(r.alpha) +
               ", \"theta\": " + format_real(r.theta) + ", \"shots\": " + std::to_string(r.shots) +
               ", \"seed\": " + std::to_string(r.seed) + ", \"x0\": " + format_real(r.x0) +
               ", \"xd\": " + format_real(r.xd) + ", \"p_error_analytic\": " + format_real(r.p_error_analytic) +
               ", \"error_rate\": " + format_real(r.error_rate) + ", \"error_ci\": " + format_real(r.error_ci) +
               ", \"mean_fidelity\": " + format_real(r.mean_fidelity) + "}";
        out += i + 1 < rows.size() ? ",\n" : "\n";
    }
    out += "]\n";
    return out;
}

inline ResultRow shots_row(Experiment experiment, const std::vector<AmplitudePair> &inputs, double alpha, double theta,
                           std::int64_t shots, std::uint64_t seed) {
    ShotStats stats = run_shots(experiment, inputs, alpha, theta, shots, seed);
    DiscriminationGeometry g = geometry(alpha, theta);
    return {std::string(to_string(experiment)), alpha,           theta,        shots,
            seed,                               g.x0,            g.xd,         p_error(alpha, theta),
            stats.error_rate,                   stats.error_ci,  stats.mean_fidelity};
}

struct OracleCheck {
    double density_deviation = 0.0;  // sup norm over the sampled x grid
    double state_fidelity = 0.0;     // branch model vs oracle after the couplings
};

/// Builds the parity-detector state in both models and compares them.
inline OracleCheck validate_oracle(const std::vector<AmplitudePair> &inputs, double alpha, double theta) {
    const ProbeMode probe{alpha, theta};
    HybridState s = new_state(inputs);
    const int index = s.add_probe(probe);
    const int n_trunc = oracle::required_truncation(alpha) + 10;
    oracle::FockOracleState f = oracle::oracle_embed(s, n_trunc);
    for (const auto &c : build_parity_coupling_pair(0, 1, index)) {
        s = apply_cross_kerr(s, c);
        f = oracle::oracle_cross_kerr(f, c);
    }
    OracleCheck check;
    check.state_fidelity = oracle::oracle_fidelity(oracle::oracle_embed(s, n_trunc), f);
    auto branch_density = outcome_density(s, index);
    auto oracle_density = oracle::oracle_homodyne_density(f, index);
    const double lo = 2.0 * alpha * std::cos(theta) - 8.0;
    const double hi = 2.0 * alpha + 8.0;
    const int points = 801;
    for (int i = 0; i < points; ++i) {
        double x = lo + (hi - lo) * i / (points - 1);
        check.density_deviation = std::max(check.density_deviation, std::abs(branch_density(x) - oracle_density(x)));
    }
    return check;
}

/// Executes a validated config. Writes the table, prints one summary line.
inline int run(const ExperimentConfig &cfg, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<ResultRow> rows;
    int status = kExitOk;
    std::string extra;
    try {
        if (cfg.experiment == "sweep") {
            for (double a : cfg.grid_alpha->points()) {
                for (double t : cfg.grid_theta->points()) {
                    rows.push_back(shots_row(cfg.sweep_of, cfg.inputs, a, t, cfg.shots, cfg.seed));
                }
            }
        } else if (cfg.experiment == "validate-oracle") {
            OracleCheck check = validate_oracle(cfg.inputs, cfg.alpha, cfg.theta);
            DiscriminationGeometry g = geometry(cfg.alpha, cfg.theta);
            rows.push_back({cfg.experiment, cfg.alpha, cfg.theta, 0, cfg.seed, g.x0, g.xd,
                            p_error(cfg.alpha, cfg.theta), check.density_deviation, 0.0, check.state_fidelity});
            extra = " sup_norm_density_deviation=" + format_real(check.density_deviation) +
                    " state_fidelity=" + format_real(check.state_fidelity);
            if (!(check.density_deviation < kOracleDensityTolerance) ||
                !(check.state_fidelity >= 1.0 - kOracleFidelityTolerance)) {
                err << "oracle validation failed" << extra << '\n';
                status = kExitInternal;
            }
        } else {
            rows.push_back(shots_row(parse_experiment(cfg.experiment), cfg.inputs, cfg.alpha, cfg.theta, cfg.shots,
                                     cfg.seed));
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }

    const std::string table = cfg.format == OutputFormat::csv ? to_csv(rows) : to_json(rows);
    if (cfg.output_path == "-") {
        out << table;
    } else {
        std::ofstream file(cfg.output_path, std::ios::binary | std::ios::trunc);
        if (!file || !(file << table) || !file.flush()) {
            err << "error: cannot write '" << cfg.output_path << "'\n";
            return kExitInternal;
        }
    }

    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const ResultRow &last = rows.back();
    // With the table on stdout the summary moves to stderr, keeping stdout reproducible.
    std::ostream &summary = cfg.output_path == "-" ? err : out;
    summary << "experiment=" << cfg.experiment << " rows=" << rows.size()
        << " p_error_analytic=" << format_real(last.p_error_analytic)
        << " error_rate=" << format_real(last.error_rate) << extra << " runtime_s=" << runtime << '\n';
    return status;
}

/// Full entry point: parse, run, map failures to exit codes.
inline int main(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << "usage: kerrqnd --experiment <name> --alpha <a> --theta <t> [--shots n] [--seed s]\n"
               "               [--input c0,c1;d0,d1] [--output path] [--format csv|json]\n"
               "               [--grid-alpha lo:hi:n --grid-theta lo:hi:n --sweep-of name] [--config file]\n";
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return run(cfg, out, err);
}

}  // namespace kerrqnd::cli
