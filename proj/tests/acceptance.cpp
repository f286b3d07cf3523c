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

// Acceptance checks, one line per criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <unistd.h>
#include <sstream>

#include "dere/harness.hpp"
#include "support.hpp"

using namespace dere;
using dere::test::median;
using dere::test::path_at;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failed = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail
              << std::endl;
}

std::string fmt(double v) { return format_number(v); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome distance_cancellation() {
    const auto t0 = Clock::now();
    const ArrayGeometry g = ArrayGeometry::half_wavelength(33, 17, 30e9);
    double worst = 0;
    for (auto [oy, oz] : {std::pair{0.0, 0.0}, {0.21, -0.13}, {-0.4, 0.35}, {0.45, 0.45}}) {
        std::vector<ChannelMatrix> cs;
        for (double r : {5.0, 20.0, 100.0}) {
            const auto ens = generate_snapshots(g, {path_at(oy, oz, r, 0.7)}, 8, kFarField, Wavefront::fresnel, 1,
                                                GainModel::fixed);
            cs.push_back(covariance_symmetric(ens));
        }
        for (std::size_t i = 1; i < cs.size(); ++i)
            worst = std::max(worst, (cs[i] - cs[0]).cwiseAbs().maxCoeff() / cs[0].cwiseAbs().maxCoeff());
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && t < 1.0, "max relative entry gap " + fmt(worst) + ", " + fmt(t) + " s"};
}

Outcome rayleigh_calibration() {
    const ArrayGeometry g = ArrayGeometry::half_wavelength(33, 33, 30e9);
    const auto p = path_at(0, 0, rayleigh_distance(g));
    const double gap = dere::test::max_abs_phase_gap(steering_exact(g, p), steering_fresnel(g, path_at(0, 0)));
    const double eighth = std::numbers::pi / 8;
    return {gap >= 0.8 * eighth && gap <= 1.2 * eighth,
            "max phase error " + fmt(gap) + " rad = " + fmt(gap / eighth) + " x pi/8"};
}

OracleReport oracle_report;
double oracle_seconds = 0;

Outcome exhaustive_exactness() {
    const auto t0 = Clock::now();
    const ExperimentConfig cfg = preset_config("desk");
    oracle_report = run_oracle_suite(cfg, {1, false});
    oracle_seconds = seconds_since(t0);
    const auto& r = oracle_report;
    const bool ok = r.instances > 0 && r.dere_exact == r.instances && r.worst_nmse_db <= -40.0 && oracle_seconds < 120;
    return {ok, std::to_string(r.dere_exact) + "/" + std::to_string(r.instances) + " exact, worst NMSE " +
                    fmt(r.worst_nmse_db) + " dB, " + fmt(oracle_seconds) + " s"};
}

Outcome oracle_equivalence() {
    const auto& r = oracle_report;
    const ExperimentConfig cfg = preset_config("desk");
    const auto& o = cfg.oracle;
    const std::size_t sum = std::size_t(2 * o.angle_points + cfg.scene.paths * o.r_points);
    const std::size_t product = std::size_t(o.angle_points * o.angle_points * o.r_points);
    const bool ok = r.instances > 0 && r.agree == r.instances && r.dere_columns == sum && r.oracle_columns == product;
    return {ok, std::to_string(r.agree) + "/" + std::to_string(r.instances) + " supports agree, columns " +
                    std::to_string(r.dere_columns) + " vs " + std::to_string(r.oracle_columns) + " (DeRe " +
                    fmt(r.dere_ms / 1000) + " s, joint " + fmt(r.oracle_ms / 1000) + " s)"};
}

std::filesystem::path sweep_a, sweep_b;
double sweep_seconds = 0;

int run_cli_sweep(const std::filesystem::path& out) {
    const std::string cmd = std::string("\"") + DERE_CLI_PATH + "\" sweep --preset desk --seed 7 --out \"" +
                            out.string() + "\" 2>/dev/null";
    return std::system(cmd.c_str());
}

Outcome nmse_trend() {
    const auto dir = std::filesystem::temp_directory_path() / ("dere_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    sweep_a = dir / "a.csv";
    sweep_b = dir / "b.csv";
    const auto t0 = Clock::now();
    if (run_cli_sweep(sweep_a) != 0)
        return {false, "sweep exited with an error"};
    sweep_seconds = seconds_since(t0);

    std::ifstream in(sweep_a);
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::map<double, std::vector<double>>> by;
    std::size_t failures = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string x; std::getline(ss, x, ',');)
            f.push_back(x);
        if (f.size() != 10)
            return {false, "malformed row '" + line + "'"};
        const double v = std::strtod(f[3].c_str(), nullptr);
        if (std::isnan(v)) {
            ++failures;
            continue;
        }
        by[f[2]][std::strtod(f[1].c_str(), nullptr)].push_back(v);
    }
    bool ok = by.size() == 2 && sweep_seconds < 600;
    std::string detail;
    for (const auto& [solver, pts] : by) {
        std::vector<double> med;
        for (const auto& [snr, v] : pts)
            med.push_back(median(v));
        ok = ok && pts.size() == 5;
        for (std::size_t i = 1; i < med.size(); ++i)
            ok = ok && med[i] < med[i - 1];
        ok = ok && med.back() <= med.front() - 10.0;
        detail += solver + " medians";
        for (double m : med)
            detail += " " + fmt(m);
        detail += " dB; ";
    }
    return {ok, detail + std::to_string(failures) + " failed trials, " + fmt(sweep_seconds) + " s"};
}

Outcome convergence_shape() {
    const auto t0 = Clock::now();
    const ExperimentConfig cfg = preset_config("desk");
    const ConvergenceResult res = run_convergence(cfg, {1, false});
    std::map<std::string, std::vector<double>> trace;
    for (const auto& m : res.median)
        trace[m.parameter].push_back(m.nmse_db);
    const auto& ch = trace["channel"];
    const std::size_t K = ch.size();
    if (K < 20)
        return {false, "trace shorter than 20 iterations"};
    const double total = ch.front() - ch.back();
    const double early = ch.front() - ch[9];
    double late_step = 0;
    for (std::size_t k = 19; k + 1 < K; ++k)
        late_step = std::max(late_step, std::abs(ch[k + 1] - ch[k]));
    const double r_plateau = trace["r"].back(), az_plateau = trace["omega_y"].back();
    const double frac = total > 0 ? early / total : 1.0;
    const bool ok = total > 0 && frac >= 0.9 && late_step < 0.1 && r_plateau > az_plateau;
    return {ok, "channel " + fmt(ch.front()) + " -> " + fmt(ch.back()) + " dB, " + fmt(100 * frac) +
                    "% of the decrease by iteration 10, max step after 20 " + fmt(late_step) + " dB; plateaus r " +
                    fmt(r_plateau) + " dB, azimuth " + fmt(az_plateau) + " dB over " + std::to_string(cfg.converge.seeds) +
                    " seeds, " + fmt(seconds_since(t0)) + " s"};
}

constexpr std::uint64_t kSpectraSeed = 1;

Outcome power_spread() {
    const ExperimentConfig cfg = preset_config("paper");
    const SpectraReport rep = run_spectra(cfg, kSpectraSeed);
    const bool ok = rep.angle_peak_off && rep.distance_peak_off && rep.dere.all();
    return {ok, "paper preset seed " + std::to_string(kSpectraSeed) + ", r = " + fmt(rep.paths[0].distance_r) +
                    " m: angular peak (" + std::to_string(rep.spectra.az_peak) + ", " +
                    std::to_string(rep.spectra.el_peak) + ") vs true (" + std::to_string(rep.true_az) + ", " +
                    std::to_string(rep.true_el) + "), distance peak " + std::to_string(rep.spectra.r_peak) +
                    " vs true " + std::to_string(rep.true_r) + ", DeRe " + (rep.dere.all() ? "exact" : "not exact") +
                    " (" + fmt(rep.dere_nmse_db) + " dB)"};
}

Outcome determinism() {
    if (sweep_a.empty() || !std::filesystem::exists(sweep_a))
        return {false, "first sweep missing"};
    if (run_cli_sweep(sweep_b) != 0)
        return {false, "second sweep exited with an error"};
    const std::string a = slurp(sweep_a), b = slurp(sweep_b);
    const std::string golden = slurp(std::filesystem::path(DERE_SOURCE_DIR) / "tests/golden/sweep_desk_seed7.csv");
    const std::string header = a.substr(0, a.find('\n'));
    const bool ok = !a.empty() && a == b && a == golden && header == kCsvHeader;
    std::filesystem::remove_all(sweep_a.parent_path());
    return {ok, std::string("runs ") + (a == b ? "identical" : "differ") + ", golden " +
                    (a == golden ? "matches" : "differs") + ", header " + (header == kCsvHeader ? "matches" : "differs") +
                    " (" + std::to_string(std::count(a.begin(), a.end(), '\n')) + " lines)"};
}

Outcome consistency_slope() {
    const ArrayGeometry g = ArrayGeometry::half_wavelength(33, 17, 30e9);
    const std::vector<PathParam> paths = {path_at(0.1, -0.2, 5.0, 4.0 / 7), path_at(-0.3, 0.1, 12.0, 2.0 / 7),
                                          path_at(0.35, 0.3, 60.0, 1.0 / 7)};
    const ChannelMatrix pop = population_covariance_symmetric(g, paths);
    const std::vector<int> Ts = {100, 1000, 10000};
    constexpr int seeds = 6;
    std::vector<double> lx, ly;
    std::string detail;
    for (int T : Ts) {
        double err = 0;
        for (int s = 0; s < seeds; ++s) {
            const auto ens = generate_snapshots(g, paths, T, kFarField, Wavefront::fresnel, std::uint64_t(1000 + s));
            err += (covariance_symmetric(ens) - pop).norm() / pop.norm();
        }
        err /= seeds;
        lx.push_back(std::log10(double(T)));
        ly.push_back(std::log10(err));
        detail += "T=" + std::to_string(T) + " " + fmt(err) + "; ";
    }
    const double mx = (lx[0] + lx[1] + lx[2]) / 3, my = (ly[0] + ly[1] + ly[2]) / 3;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    return {std::abs(slope + 0.5) <= 0.1, detail + "slope " + fmt(slope)};
}

} // namespace

int main() {
    report(1, "distance cancellation in C", distance_cancellation);
    report(2, "Rayleigh distance phase error", rayleigh_calibration);
    report(3, "exhaustive 9x9 exact recovery", exhaustive_exactness);
    report(4, "joint oracle equivalence", oracle_equivalence);
    report(5, "NMSE decreases with SNR", nmse_trend);
    report(6, "VBI convergence shape", convergence_shape);
    report(7, "power spread in naive spectra", power_spread);
    report(8, "deterministic sweep and schema", determinism);
    report(9, "estimator consistency slope", consistency_slope);
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failed;
}
