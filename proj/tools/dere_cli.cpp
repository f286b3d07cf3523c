// SPDX-License-Identifier: Apache-2.0
//
// dere: near-field holographic MIMO channel estimation by decomposition and reconstruction
// Copyright (C) 2026 The dere authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dere/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFailures = 2;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "csv";
    std::string preset = "desk";
    int threads = -1;
    bool timing = false;
    bool dump = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "config file applied on top of the preset");
    cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
    cmd->add_option("--out", c.out_path, "output file (default: stdout)");
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--preset", c.preset, "base configuration")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--threads", c.threads, "worker threads, 0 for all cores (overrides sweep.threads)");
    cmd->add_flag("--timing", c.timing, "record wall time in runtime_ms");
    cmd->add_flag("--dump-config", c.dump, "print the resolved configuration to stderr");
}

dere::ExperimentConfig resolve(const Common& c) {
    dere::ExperimentConfig cfg;
    dere::apply_config(cfg, dere::preset_text(c.preset));
    if (!c.config_path.empty()) {
        std::ifstream in(c.config_path);
        if (!in)
            throw dere::ConfigError("cannot read config file '" + c.config_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        try {
            dere::apply_config(cfg, text.str());
        } catch (const dere::ConfigError& e) {
            throw dere::ConfigError(c.config_path + ": " + e.what());
        }
    }
    if (c.seed)
        cfg.seed = *c.seed;
    dere::validate(cfg);
    for (const auto& w : cfg.warnings)
        std::cerr << "warning: " << w << '\n';
    if (c.dump)
        std::cerr << dere::dump_config(cfg);
    return cfg;
}

template <class Write>
void write_output(const std::string& path, Write&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    write(out);
    if (!out)
        throw std::runtime_error("failed writing '" + path + "'");
}

int exit_for(double failure_rate, double threshold) {
    if (failure_rate > threshold) {
        std::cerr << "failure rate " << dere::format_number(failure_rate) << " exceeds sweep.max_failure_rate "
                  << dere::format_number(threshold) << '\n';
        return kExitFailures;
    }
    return kExitOk;
}

int run_sweep(const Common& c) {
    const dere::ExperimentConfig cfg = resolve(c);
    const dere::SweepResult res = dere::run_sweep(cfg, {c.threads, c.timing});
    write_output(c.out_path, [&](std::ostream& out) {
        if (c.format == "json")
            dere::write_json(out, res.records);
        else
            dere::write_csv(out, res.records);
    });
    const auto& s = res.summary;
    std::cerr << "records " << s.records << ", failures " << s.failures << " (rate "
              << dere::format_number(s.failure_rate) << "), wall " << dere::format_number(s.wall_ms / 1000.0)
              << " s, dictionary columns " << s.dere_columns << " (joint search would need " << s.oracle_columns
              << ")\n";
    for (const auto& m : s.failure_messages)
        std::cerr << "  " << m << '\n';
    return exit_for(s.failure_rate, cfg.sweep.max_failure_rate);
}

int run_converge(const Common& c, bool median_only) {
    dere::ExperimentConfig cfg = resolve(c);
    const dere::ConvergenceResult res = dere::run_convergence(cfg, {c.threads, c.timing});
    const auto& rows = median_only ? res.median : res.records;
    write_output(c.out_path, [&](std::ostream& out) {
        if (c.format == "json")
            dere::write_convergence_json(out, rows);
        else
            dere::write_convergence_csv(out, rows);
    });
    const double rate = double(res.failures) / double(cfg.converge.seeds);
    std::cerr << "seeds " << cfg.converge.seeds << ", failures " << res.failures << '\n';
    return exit_for(rate, cfg.sweep.max_failure_rate);
}

int run_spectra(const Common& c) {
    const dere::ExperimentConfig cfg = resolve(c);
    const dere::SpectraReport rep = dere::run_spectra(cfg, cfg.seed);
    write_output(c.out_path, [&](std::ostream& out) {
        if (c.format == "json")
            dere::write_spectra_json(out, rep);
        else
            dere::write_spectra_csv(out, rep);
    });
    std::cerr << "angular peak (" << rep.spectra.az_peak << ", " << rep.spectra.el_peak << ") vs true (" << rep.true_az
              << ", " << rep.true_el << "); distance peak " << rep.spectra.r_peak << " vs true " << rep.true_r
              << "; DeRe exact " << (rep.dere.all() ? "yes" : "no") << '\n';
    return kExitOk;
}

int run_oracle(const Common& c) {
    const dere::ExperimentConfig cfg = resolve(c);
    const dere::OracleReport rep = dere::run_oracle_suite(cfg, {c.threads, c.timing});
    write_output(c.out_path, [&](std::ostream& out) {
        if (c.format == "json") {
            dere::write_oracle_json(out, rep);
        } else {
            out << "instances,dere_exact,oracle_exact,agree,worst_nmse_db,dere_columns,oracle_columns\n"
                << rep.instances << ',' << rep.dere_exact << ',' << rep.oracle_exact << ',' << rep.agree << ','
                << dere::format_number(rep.worst_nmse_db) << ',' << rep.dere_columns << ',' << rep.oracle_columns
                << '\n';
        }
    });
    for (const auto& m : rep.counterexamples)
        std::cerr << "  " << m << '\n';
    const std::size_t bad = rep.instances - std::min({rep.dere_exact, rep.oracle_exact, rep.agree});
    return exit_for(rep.instances ? double(bad) / double(rep.instances) : 0.0, cfg.sweep.max_failure_rate);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-field holographic MIMO channel estimation experiments"};
    app.require_subcommand(1);
    Common common;
    bool median_only = false;

    auto* sweep = app.add_subcommand("sweep", "NMSE versus SNR");
    auto* converge = app.add_subcommand("converge", "per-iteration VBI convergence traces");
    auto* spectra = app.add_subcommand("spectra", "planar angular and distance power spectra of one scene");
    auto* oracle = app.add_subcommand("oracle", "small exhaustive comparison against the joint 3D search");
    for (auto* cmd : {sweep, converge, spectra, oracle})
        add_common(cmd, common);
    converge->add_flag("--median", median_only, "write the per-iteration median over seeds only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*sweep)
            return run_sweep(common);
        if (*converge)
            return run_converge(common, median_only);
        if (*spectra)
            return run_spectra(common);
        return run_oracle(common);
    } catch (const dere::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailures;
    }
}
