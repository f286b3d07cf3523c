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

#include "dere/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dere {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

double parse_double(const std::string& v) {
    const std::string l = lower(v);
    if (l == "inf" || l == "+inf")
        return std::numeric_limits<double>::infinity();
    if (l == "-inf")
        return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'");
    }
    if (used != v.size() || std::isnan(out))
        throw ConfigError("expected a number, got '" + v + "'");
    return out;
}

long long parse_int(const std::string& v) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError("expected an unsigned 64-bit integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v) {
    const std::string l = lower(v);
    if (l == "true" || l == "yes" || l == "on" || l == "1")
        return true;
    if (l == "false" || l == "no" || l == "off" || l == "0")
        return false;
    throw ConfigError("expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ','))
        if (const std::string t = trim(item); !t.empty())
            out.push_back(t);
    return out;
}

template <class E>
E parse_enum(const std::string& v, std::initializer_list<std::pair<const char*, E>> names) {
    const std::string l = lower(v);
    std::string allowed;
    for (const auto& [name, value] : names) {
        if (l == name)
            return value;
        allowed += (allowed.empty() ? "" : "|") + std::string(name);
    }
    throw ConfigError("expected one of " + allowed + ", got '" + v + "'");
}

template <class E>
std::string enum_name(E e, std::initializer_list<std::pair<const char*, E>> names) {
    for (const auto& [name, value] : names)
        if (value == e)
            return name;
    return "?";
}

std::string fmt(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += fmt(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

const std::initializer_list<std::pair<const char*, PowerProfile>> kProfiles = {
    {"equal", PowerProfile::equal}, {"geometric", PowerProfile::geometric}, {"random", PowerProfile::random}};
const std::initializer_list<std::pair<const char*, Wavefront>> kWavefronts = {{"fresnel", Wavefront::fresnel},
                                                                              {"exact", Wavefront::exact}};
const std::initializer_list<std::pair<const char*, GainModel>> kGains = {{"rayleigh", GainModel::rayleigh},
                                                                         {"fixed", GainModel::fixed}};
const std::initializer_list<std::pair<const char*, SolverChoice>> kSolvers = {
    {"omp", SolverChoice::omp}, {"vbi", SolverChoice::vbi}, {"both", SolverChoice::both}};
const std::initializer_list<std::pair<const char*, StoppingRule::Mode>> kStops = {
    {"fixed", StoppingRule::Mode::fixed_sparsity},
    {"residual", StoppingRule::Mode::residual_threshold},
    {"combined", StoppingRule::Mode::combined}};
const std::initializer_list<std::pair<const char*, PairingRule>> kPairings = {{"greedy", PairingRule::greedy},
                                                                              {"exact", PairingRule::exact}};
const std::initializer_list<std::pair<const char*, SblUpdate>> kUpdates = {{"mackay", SblUpdate::mackay},
                                                                           {"em", SblUpdate::em}};

struct Field {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field int_field(T ExperimentConfig::*block, int T::*member) {
    return {[=](ExperimentConfig& c, const std::string& v) {
                const long long x = parse_int(v);
                if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                    throw ConfigError("integer out of range: " + v);
                c.*block.*member = int(x);
            },
            [=](const ExperimentConfig& c) { return std::to_string(c.*block.*member); }};
}

template <class T>
Field double_field(T ExperimentConfig::*block, double T::*member) {
    return {[=](ExperimentConfig& c, const std::string& v) { c.*block.*member = parse_double(v); },
            [=](const ExperimentConfig& c) { return fmt(c.*block.*member); }};
}

template <class T>
Field optional_double_field(T ExperimentConfig::*block, std::optional<double> T::*member) {
    return {[=](ExperimentConfig& c, const std::string& v) {
                if (lower(v) == "auto")
                    (c.*block.*member).reset();
                else
                    c.*block.*member = parse_double(v);
            },
            [=](const ExperimentConfig& c) {
                const auto& o = c.*block.*member;
                return o ? fmt(*o) : std::string("auto");
            }};
}

template <class T>
Field bool_field(T ExperimentConfig::*block, bool T::*member) {
    return {[=](ExperimentConfig& c, const std::string& v) { c.*block.*member = parse_bool(v); },
            [=](const ExperimentConfig& c) { return std::string(c.*block.*member ? "true" : "false"); }};
}

template <class T, class E>
Field enum_field(T ExperimentConfig::*block, E T::*member, std::initializer_list<std::pair<const char*, E>> names) {
    return {[=](ExperimentConfig& c, const std::string& v) { c.*block.*member = parse_enum(v, names); },
            [=](const ExperimentConfig& c) { return enum_name(c.*block.*member, names); }};
}

template <class T>
Field int_list_field(T ExperimentConfig::*block, std::vector<int> T::*member) {
    return {[=](ExperimentConfig& c, const std::string& v) {
                std::vector<int> out;
                for (const auto& s : split_list(v))
                    out.push_back(int(parse_int(s)));
                c.*block.*member = std::move(out);
            },
            [=](const ExperimentConfig& c) { return join(c.*block.*member); }};
}

const std::map<std::string, Field>& fields() {
    using C = ExperimentConfig;
    static const std::map<std::string, Field> table = {
        {"seed", {[](C& c, const std::string& v) { c.seed = parse_u64(v); },
                  [](const C& c) { return std::to_string(c.seed); }}},

        {"geometry.n_y", int_field(&C::geometry, &GeometryBlock::n_y)},
        {"geometry.n_z", int_field(&C::geometry, &GeometryBlock::n_z)},
        {"geometry.d_over_lambda", double_field(&C::geometry, &GeometryBlock::d_over_lambda)},
        {"geometry.carrier_hz", double_field(&C::geometry, &GeometryBlock::carrier_hz)},

        {"scene.paths", int_field(&C::scene, &SceneBlock::paths)},
        {"scene.max_angle_deg", double_field(&C::scene, &SceneBlock::max_angle_deg)},
        {"scene.r_min", double_field(&C::scene, &SceneBlock::r_min)},
        {"scene.r_max", double_field(&C::scene, &SceneBlock::r_max)},
        {"scene.power_profile", enum_field(&C::scene, &SceneBlock::power_profile, kProfiles)},
        {"scene.power_ratio", double_field(&C::scene, &SceneBlock::power_ratio)},
        {"scene.on_grid", bool_field(&C::scene, &SceneBlock::on_grid)},
        {"scene.min_separation_bins", int_field(&C::scene, &SceneBlock::min_separation_bins)},
        {"scene.wavefront", enum_field(&C::scene, &SceneBlock::wavefront, kWavefronts)},
        {"scene.gain_model", enum_field(&C::scene, &SceneBlock::gain_model, kGains)},

        {"estimation.solver", enum_field(&C::estimation, &EstimationBlock::solver, kSolvers)},
        {"estimation.snapshots", int_field(&C::estimation, &EstimationBlock::snapshots)},
        {"estimation.az_points", int_field(&C::estimation, &EstimationBlock::az_points)},
        {"estimation.el_points", int_field(&C::estimation, &EstimationBlock::el_points)},
        {"estimation.az_omega_max", optional_double_field(&C::estimation, &EstimationBlock::az_omega_max)},
        {"estimation.el_omega_max", optional_double_field(&C::estimation, &EstimationBlock::el_omega_max)},
        {"estimation.r_points", int_field(&C::estimation, &EstimationBlock::r_points)},
        {"estimation.r_far_field", bool_field(&C::estimation, &EstimationBlock::r_far_field)},
        {"estimation.stop", enum_field(&C::estimation, &EstimationBlock::stop, kStops)},
        {"estimation.residual_epsilon", double_field(&C::estimation, &EstimationBlock::residual_epsilon)},
        {"estimation.max_atoms", int_field(&C::estimation, &EstimationBlock::max_atoms)},
        {"estimation.az_rows", int_list_field(&C::estimation, &EstimationBlock::az_rows)},
        {"estimation.el_cols", int_list_field(&C::estimation, &EstimationBlock::el_cols)},
        {"estimation.pairing", enum_field(&C::estimation, &EstimationBlock::pairing, kPairings)},
        {"estimation.sbl_max_iter", int_field(&C::estimation, &EstimationBlock::sbl_max_iter)},
        {"estimation.sbl_prune", double_field(&C::estimation, &EstimationBlock::sbl_prune)},
        {"estimation.sbl_tol", double_field(&C::estimation, &EstimationBlock::sbl_tol)},
        {"estimation.sbl_update", enum_field(&C::estimation, &EstimationBlock::sbl_update, kUpdates)},
        {"estimation.debias_center", bool_field(&C::estimation, &EstimationBlock::debias_center)},

        {"sweep.snr_db", {[](C& c, const std::string& v) {
                              std::vector<double> out;
                              for (const auto& s : split_list(v))
                                  out.push_back(parse_double(s));
                              c.sweep.snr_db = std::move(out);
                          },
                          [](const C& c) { return join(c.sweep.snr_db); }}},
        {"sweep.trials", int_field(&C::sweep, &SweepBlock::trials)},
        {"sweep.max_failure_rate", double_field(&C::sweep, &SweepBlock::max_failure_rate)},
        {"sweep.threads", int_field(&C::sweep, &SweepBlock::threads)},

        {"converge.snr_db", double_field(&C::converge, &ConvergeBlock::snr_db)},
        {"converge.seeds", int_field(&C::converge, &ConvergeBlock::seeds)},
        {"converge.max_iter", int_field(&C::converge, &ConvergeBlock::max_iter)},

        {"spectra.paths", int_field(&C::spectra, &SpectraBlock::paths)},
        {"spectra.distance_r", double_field(&C::spectra, &SpectraBlock::distance_r)},
        {"spectra.snr_db", double_field(&C::spectra, &SpectraBlock::snr_db)},

        {"oracle.n", int_field(&C::oracle, &OracleBlock::n)},
        {"oracle.angle_points", int_field(&C::oracle, &OracleBlock::angle_points)},
        {"oracle.r_points", int_field(&C::oracle, &OracleBlock::r_points)},
        {"oracle.r_min", double_field(&C::oracle, &OracleBlock::r_min)},
        {"oracle.r_max", double_field(&C::oracle, &OracleBlock::r_max)},
        {"oracle.snapshots", int_field(&C::oracle, &OracleBlock::snapshots)},
        {"oracle.stride", int_field(&C::oracle, &OracleBlock::stride)},
    };
    return table;
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok)
        throw ConfigError(field + ": " + what);
}

} // namespace

void apply_config(ExperimentConfig& cfg, std::string_view text) {
    const auto& table = fields();
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string where = "line " + std::to_string(line_no);
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": unterminated section header '" + line + "'");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(where + ": empty section header");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        std::string key = lower(trim(std::string_view(line).substr(0, eq)));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty())
            throw ConfigError(where + ": missing key");
        if (!section.empty() && key.find('.') == std::string::npos)
            key = section + "." + key;
        const auto it = table.find(key);
        if (it == table.end())
            throw ConfigError(where + ": unknown key '" + key + "'");
        if (value.empty())
            throw ConfigError(where + ": " + key + ": missing value");
        try {
            it->second.set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + key + ": " + e.what());
        }
    }
}

ExperimentConfig load_config(std::string_view text) {
    ExperimentConfig cfg;
    apply_config(cfg, text);
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return load_config(text.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

ArrayGeometry ExperimentConfig::array() const {
    const double lambda = 299792458.0 / geometry.carrier_hz;
    return {geometry.n_y, geometry.n_z, geometry.d_over_lambda * lambda, lambda};
}

PipelineConfig ExperimentConfig::pipeline(Solver solver) const {
    const auto& e = estimation;
    const int ny = e.az_points > 0 ? e.az_points : std::max(geometry.n_y, 2);
    const int nz = e.el_points > 0 ? e.el_points : std::max(geometry.n_z, 2);
    const double dl = geometry.d_over_lambda;
    PipelineConfig p{angle_grid(GridKind::azimuth, ny, e.az_omega_max.value_or(dft_omega_max(ny, dl)), dl),
                     angle_grid(GridKind::elevation, nz, e.el_omega_max.value_or(dft_omega_max(nz, dl)), dl),
                     distance_grid(scene.r_min, scene.r_max, e.r_points, e.r_far_field)};
    p.num_paths = scene.paths;
    p.solver = solver;
    p.sbl.max_iter = e.sbl_max_iter;
    p.sbl.prune_threshold = e.sbl_prune;
    p.sbl.tol = e.sbl_tol;
    p.sbl.update = e.sbl_update;
    p.stop_mode = e.stop;
    p.residual_epsilon = e.residual_epsilon;
    p.max_atoms = e.max_atoms;
    p.az_rows = e.az_rows;
    p.el_cols = e.el_cols;
    p.pairing = e.pairing;
    p.decomposition.debias_center = e.debias_center;
    return p;
}

SceneSpec ExperimentConfig::scene_spec(const PipelineConfig& p) const {
    SceneSpec s;
    s.num_paths = scene.paths;
    s.max_angle_rad = scene.max_angle_deg * std::numbers::pi / 180.0;
    s.r_min = scene.r_min;
    s.r_max = scene.r_max;
    s.profile = scene.power_profile;
    s.power_ratio = scene.power_ratio;
    s.grid_aligned = scene.on_grid;
    s.min_separation_bins = scene.min_separation_bins;
    s.az_grid = p.az_grid.values();
    s.el_grid = p.el_grid.values();
    s.r_grid = p.r_grid.values();
    return s;
}

std::vector<Solver> ExperimentConfig::solvers() const {
    switch (estimation.solver) {
    case SolverChoice::omp:
        return {Solver::omp};
    case SolverChoice::vbi:
        return {Solver::vbi};
    case SolverChoice::both:
        break;
    }
    return {Solver::omp, Solver::vbi};
}

void validate(ExperimentConfig& cfg) {
    cfg.warnings.clear();
    const auto& g = cfg.geometry;
    require(g.n_y > 0 && g.n_y % 2 == 1, "geometry.n_y", "n_y must be odd and positive");
    require(g.n_z > 0 && g.n_z % 2 == 1, "geometry.n_z", "n_z must be odd and positive");
    require(g.d_over_lambda > 0.0 && std::isfinite(g.d_over_lambda), "geometry.d_over_lambda", "must be positive");
    require(g.carrier_hz > 0.0 && std::isfinite(g.carrier_hz), "geometry.carrier_hz", "must be positive");

    const auto& s = cfg.scene;
    require(s.paths >= 1, "scene.paths", "need at least one path");
    require(s.max_angle_deg > 0.0 && s.max_angle_deg < 90.0, "scene.max_angle_deg", "must lie in (0, 90)");
    require(s.r_min > 0.0 && s.r_max > s.r_min && std::isfinite(s.r_max), "scene.r_min",
            "need 0 < r_min < r_max < inf");
    require(s.power_ratio > 0.0 && s.power_ratio <= 1.0, "scene.power_ratio", "must lie in (0, 1]");
    require(s.min_separation_bins >= 0, "scene.min_separation_bins", "must be non-negative");

    const auto& e = cfg.estimation;
    require(e.snapshots >= 1, "estimation.snapshots", "need at least one snapshot");
    require(e.az_points == 0 || e.az_points >= 2, "estimation.az_points", "need at least two points (0 for auto)");
    require(e.el_points == 0 || e.el_points >= 2, "estimation.el_points", "need at least two points (0 for auto)");
    require(e.r_points >= 2, "estimation.r_points", "need at least two points");
    require(e.residual_epsilon >= 0.0, "estimation.residual_epsilon", "must be non-negative");
    require(e.max_atoms >= 1, "estimation.max_atoms", "must be positive");
    require(!e.az_rows.empty(), "estimation.az_rows", "need at least one row offset");
    require(!e.el_cols.empty(), "estimation.el_cols", "need at least one column offset");
    for (int r : e.az_rows)
        require(std::abs(r) <= (g.n_z - 1) / 2, "estimation.az_rows", "row offset " + std::to_string(r) + " is outside the array");
    for (int c : e.el_cols)
        require(std::abs(c) <= (g.n_y - 1) / 2, "estimation.el_cols",
                "column offset " + std::to_string(c) + " is outside the array");
    require(e.sbl_max_iter >= 1, "estimation.sbl_max_iter", "must be positive");
    require(e.sbl_prune > 0.0, "estimation.sbl_prune", "must be positive");
    require(e.sbl_tol >= 0.0, "estimation.sbl_tol", "must be non-negative");
    if (e.pairing == PairingRule::exact && s.paths > 8)
        cfg.warnings.push_back("estimation.pairing: exact pairing enumerates L! assignments");

    const auto& w = cfg.sweep;
    require(!w.snr_db.empty(), "sweep.snr_db", "need at least one SNR point");
    require(w.trials >= 1, "sweep.trials", "need at least one trial");
    require(w.max_failure_rate >= 0.0 && w.max_failure_rate <= 1.0, "sweep.max_failure_rate", "must lie in [0, 1]");
    require(w.threads >= 0, "sweep.threads", "must be non-negative (0 for hardware concurrency)");

    require(cfg.converge.seeds >= 1, "converge.seeds", "need at least one seed");
    require(cfg.converge.max_iter >= 1, "converge.max_iter", "need at least one iteration");
    require(!std::isnan(cfg.converge.snr_db), "converge.snr_db", "must be a number");
    require(cfg.spectra.paths >= 1, "spectra.paths", "need at least one path");
    require(cfg.spectra.distance_r > 0.0, "spectra.distance_r", "must be positive");

    const auto& o = cfg.oracle;
    require(o.n >= 3 && o.n % 2 == 1, "oracle.n", "must be odd and at least 3");
    require(o.angle_points >= 2, "oracle.angle_points", "need at least two points");
    require(o.r_points >= 2, "oracle.r_points", "need at least two points");
    require(o.r_min > 0.0 && o.r_max > o.r_min, "oracle.r_min", "need 0 < r_min < r_max");
    require(o.snapshots >= 1, "oracle.snapshots", "need at least one snapshot");
    require(o.stride >= 1, "oracle.stride", "must be positive");

    // module preconditions: geometry, grids and scene placement
    PipelineConfig p = [&] {
        try {
            (void)cfg.array();
            return cfg.pipeline(Solver::omp);
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("estimation: ") + ex.what());
        }
    }();
    require(std::size_t(s.paths) <= p.az_grid.count() && std::size_t(s.paths) <= p.el_grid.count(), "scene.paths",
            "more paths than angle grid points");
    const double span = std::sin(s.max_angle_deg * std::numbers::pi / 180.0);
    if (span >= 0.25 / g.d_over_lambda)
        cfg.warnings.push_back("scene.max_angle_deg: cosines reach lambda / (4 d), where the doubled phase of the "
                               "symmetric statistic aliases");
    if (span > p.az_grid.values().back() || span > p.el_grid.values().back())
        cfg.warnings.push_back("scene.max_angle_deg: angle span exceeds the estimation grid; on-grid scenes use the "
                               "grid points inside the span");
    if (s.on_grid) {
        try {
            Rng probe(0);
            (void)generate_paths(probe, cfg.scene_spec(p));
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("scene: ") + ex.what());
        }
    }
    if (s.paths * 2 > g.n_z || s.paths * 2 > g.n_y)
        cfg.warnings.push_back("scene.paths: many paths for a small array; recovery may be ambiguous");
}

std::string preset_text(std::string_view name) {
    static const char* const desk = R"(# Desk-scale default: 33 x 17 half-wavelength UPA at 30 GHz.
seed = 1

[geometry]
n_y = 33
n_z = 17
d_over_lambda = 0.5
carrier_hz = 30e9

[scene]
paths = 3
max_angle_deg = 28
r_min = 5
r_max = 100
power_profile = geometric
power_ratio = 0.5
on_grid = true
min_separation_bins = 2
wavefront = fresnel
gain_model = rayleigh

[estimation]
solver = both
snapshots = 200
r_points = 32
stop = fixed
pairing = greedy
sbl_max_iter = 100
sbl_update = mackay

[sweep]
snr_db = 0, 5, 10, 15, 20
trials = 100
max_failure_rate = 0.05
threads = 1

[converge]
snr_db = 10
seeds = 50
max_iter = 30
)";
    static const char* const paper = R"(# Full-scale array: 129 x 65 half-wavelength UPA at 30 GHz.
seed = 1

[geometry]
n_y = 129
n_z = 65
d_over_lambda = 0.5
carrier_hz = 30e9

[scene]
paths = 3
max_angle_deg = 28
r_min = 5
r_max = 100
power_profile = geometric
power_ratio = 0.5
on_grid = true
min_separation_bins = 2
wavefront = fresnel
gain_model = rayleigh

[estimation]
solver = both
snapshots = 200
r_points = 64
stop = fixed
pairing = greedy
sbl_max_iter = 100
sbl_update = mackay

[sweep]
snr_db = 0, 5, 10, 15, 20
trials = 20
max_failure_rate = 0.05
threads = 0

[converge]
snr_db = 10
seeds = 20
max_iter = 30
)";
    if (name == "desk")
        return desk;
    if (name == "paper")
        return paper;
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected desk or paper)");
}

ExperimentConfig preset_config(std::string_view name) { return load_config(preset_text(name)); }

std::string dump_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& [key, field] : fields())
        out += key + " = " + field.get(cfg) + "\n";
    return out;
}

std::string to_string(SolverChoice s) { return enum_name(s, kSolvers); }

std::string to_string(Solver s) { return s == Solver::omp ? "omp" : "vbi"; }

} // namespace dere
