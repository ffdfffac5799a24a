// Copyright 2026 The seqrac Authors
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

// Command-line front end: theory evaluation, sweeps, optics verification,
// count simulation and count-table analysis.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqrac/seqrac.hpp"

namespace {

using namespace seqrac;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char *classical_tag(double w) { return w > kClassicalLimit ? "nonclassical" : "classical"; }

/// Runs write against stdout for "-" or the named file.
void emit(const std::string &path, const std::function<void(std::ostream &)> &write) {
    if (path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write(out);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<double> parse_eta_list(const std::string &text) {
    std::vector<double> etas;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw UsageError("--etas: '" + item + "' is not a number");
        if (!(v >= 0.0 && v <= 1.0)) throw UsageError("--etas: " + item + " is outside [0, 1]");
        etas.push_back(v);
    }
    return etas;
}

void run_theory(double eta, int receivers) {
    std::cout << std::fixed << std::setprecision(6);
    std::cout << "eta = " << eta << '\n';
    std::vector<double> etas(std::size_t(receivers), eta);
    if (receivers > 1) etas.back() = 1.0;
    const auto chain = witness_chain(etas);
    for (std::size_t k = 0; k < chain.size(); ++k) {
        std::string label = receivers == 2 ? (k == 0 ? "W_AB " : "W_AC ") : "W_AR" + std::to_string(k + 1);
        std::cout << label << " = " << chain[k] << "  " << classical_tag(chain[k]) << '\n';
    }
    const double abc = witness_abc(eta);
    std::cout << "W_ABC = " << abc << "  (joint decoding, limit 0.5)\n";
}

void run_sweep(std::size_t steps, const std::string &out) {
    const auto rows = expsim::theory_curve(steps);
    emit(out, [&](std::ostream &os) { expsim::write_curve_csv(os, rows); });
}

void run_simulate(double eta, double mean, std::uint64_t seed, const std::string &out) {
    const auto table = expsim::simulate_counts(eta, mean, seed);
    emit(out, [&](std::ostream &os) { expsim::write_count_csv(os, table); });
}

expsim::CountTable load_table(const std::string &path) {
    if (path == "-") return expsim::read_count_csv(std::cin);
    return expsim::load_count_csv(path);
}

void run_analyze(const std::string &counts, std::size_t resamples, std::uint64_t seed, const std::string &out) {
    const auto table = load_table(counts);
    const auto result = expsim::analyze_table(table, resamples, seed);
    for (const auto &s : result.skipped) std::cerr << "seqrac: warning: skipped block: " << s.reason << '\n';
    emit(out, [&](std::ostream &os) { os << std::setw(2) << expsim::to_json(result) << '\n'; });
}

int run_verify_optics(const std::string &path, const std::string &eta_text, double tol) {
    const auto etas = parse_eta_list(eta_text);
    const auto rows = expsim::settings_from_table(load_table(path));
    const auto report = optics::verify_angle_table(rows, etas, tol);
    std::cout << std::scientific << std::setprecision(3);
    for (const auto &r : report.rows)
        std::cout << r.row.setting.str() << "  max deviation " << r.max_deviation << "  at eta "
                  << std::defaultfloat << r.worst_eta << std::scientific
                  << (r.max_deviation <= tol ? "" : "  MISMATCH") << '\n';
    const auto failures = report.failures();
    if (failures.empty()) {
        std::cout << "PASS: " << report.checks << " checks within " << tol << '\n';
        return 0;
    }
    std::cout << "FAIL: " << failures.size() << " of " << report.rows.size() << " rows exceed " << tol << '\n';
    return 1;
}

void run_bounds(std::optional<double> wab, std::optional<double> wac) {
    if (!wab && !wac) throw UsageError("bounds needs --wab, --wac or both");
    auto flagged = [](const char *flag, auto &&fn) {
        try {
            return fn();
        } catch (const DomainError &e) {
            throw DomainError(std::string(flag) + ": " + e.what());
        }
    };
    std::cout << std::fixed << std::setprecision(6);
    if (wab) {
        const double low = eta_lower_bound(*wab);
        const double bound = flagged("--wab", [&] { return tradeoff_bound(*wab); });
        std::cout << "eta_low = " << low << '\n';
        std::cout << "tradeoff_bound(W_AB) = " << bound << "  (max W_AC)\n";
    }
    if (wac) {
        const double up = flagged("--wac", [&] { return eta_upper_bound(*wac); });
        const double inverse = flagged("--wac", [&] { return inverse_tradeoff_bound(*wac); });
        std::cout << "eta_up = " << up << '\n';
        std::cout << "inverse_tradeoff_bound(W_AC) = " << inverse << "  (max W_AB)\n";
        std::cout << "crossing (W_AC > " << kCrossingWitness << ") = " << (*wac > kCrossingWitness ? "true" : "false")
                  << '\n';
    }
}

void run_no_go() {
    const auto r = three_receiver_no_go();
    std::cout << std::fixed << std::setprecision(6);
    std::cout << "max W_AR3 = " << r.max_third_witness << "  at eta1 = " << r.eta1 << ", eta2 = " << r.eta2
              << ", eta3 = 1\n";
    std::cout << "supremum  = " << three_receiver_supremum() << '\n';
    std::cout << "gap to 3/4 = " << kClassicalLimit - r.max_third_witness << '\n';
    const std::vector<double> edge{1.0 / kSqrt2, 2.0 * (kSqrt2 - 1.0), 1.0};
    const auto w = witness_chain(edge);
    std::cout << "boundary: W_AR1(1/sqrt2) = " << w[0] << ", W_AR2(1/sqrt2, 2(sqrt2-1)) = " << w[1]
              << ", W_AR3 = " << w[2] << '\n';
    std::cout << "third receiver " << (r.max_third_witness < kClassicalLimit ? "cannot" : "can")
              << " exceed 3/4\n";
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Sequential quantum random access code simulator"};
    app.require_subcommand(1);

    double eta = 0.0;
    int receivers = 2;
    auto *theory = app.add_subcommand("theory", "closed-form witnesses at one strength");
    theory->add_option("--eta", eta, "measurement strength")->required()->check(CLI::Range(0.0, 1.0));
    theory->add_option("--receivers", receivers, "receivers in the chain (last one measures projectively)")
        ->check(CLI::Range(1, 1000));

    std::size_t steps = 11;
    std::string out = "-";
    auto *sweep = app.add_subcommand("sweep", "theory curve CSV over an equally spaced strength grid");
    sweep->add_option("--steps", steps, "number of grid points")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
    sweep->add_option("--out", out, "output path, - for stdout");

    double mean_counts = 8000.0;
    std::uint64_t seed = 1;
    auto *simulate = app.add_subcommand("simulate", "synthetic coincidence-count table");
    simulate->add_option("--eta", eta, "measurement strength")->required()->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--mean-counts", mean_counts, "mean total counts per (x, y, z) group")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", seed, "random seed");
    simulate->add_option("--out", out, "output path, - for stdout");

    std::string counts;
    std::size_t resamples = 10000;
    auto *analyze = app.add_subcommand("analyze", "witnesses, strength bounds and Monte Carlo error bars");
    analyze->add_option("--counts", counts, "count table CSV, - for stdin")->required();
    analyze->add_option("--resamples", resamples, "Poisson bootstrap resamples")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
    analyze->add_option("--seed", seed, "random seed");
    analyze->add_option("--out", out, "output path, - for stdout");

    std::string table;
    std::string eta_list = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
    double tol = 1e-9;
    auto *verify = app.add_subcommand("verify-optics", "check plate angles against the protocol");
    verify->add_option("--table", table, "count table CSV carrying plate angles")->required();
    verify->add_option("--etas", eta_list, "comma-separated strengths, may be empty")->expected(0, 1);
    verify->add_option("--tol", tol, "absolute probability tolerance")->check(CLI::PositiveNumber);

    std::optional<double> wab, wac;
    auto *bounds = app.add_subcommand("bounds", "self-test bounds from observed witnesses");
    bounds->add_option("--wab", wab, "observed W_AB");
    bounds->add_option("--wac", wac, "observed W_AC");

    auto *no_go = app.add_subcommand("no-go", "best third-receiver witness when two receivers beat 3/4");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "seqrac: error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*theory) run_theory(eta, receivers);
        if (*sweep) run_sweep(steps, out);
        if (*simulate) run_simulate(eta, mean_counts, seed, out);
        if (*analyze) run_analyze(counts, resamples, seed, out);
        if (*verify) return run_verify_optics(table, eta_list, tol);
        if (*bounds) run_bounds(wab, wac);
        if (*no_go) run_no_go();
    } catch (const UsageError &e) {
        std::cerr << "seqrac: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "seqrac: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
