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

#include "dere/serialization.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "dere/harness.hpp"

namespace dere {

namespace {

using nlohmann::json;

json number(double v) {
    if (std::isnan(v))
        return nullptr;
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

double read_number(const json& j) {
    if (j.is_null())
        return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        throw std::runtime_error("unexpected number string '" + s + "'");
    }
    return j.get<double>();
}

json complex_value(cd v) { return json::array({number(v.real()), number(v.imag())}); }

json recovery(const RecoveryResult& r) {
    json trace = json::array();
    for (double t : r.trace)
        trace.push_back(number(t));
    return {{"support", r.support},
            {"residual_norm", number(r.residual_norm)},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"trace", trace}};
}

json angle(const AngleRecovery& a) {
    json atoms = json::array();
    for (const auto& at : a.atoms)
        atoms.push_back({{"grid_index", at.grid_index},
                         {"omega", number(at.omega)},
                         {"power", number(at.power)},
                         {"coefficient", complex_value(at.coefficient)}});
    return {{"atoms", atoms}, {"result", recovery(a.result)}};
}

json path_param(const PathParam& p) {
    const Cosines c = p.cosines();
    return {{"theta", number(p.direction.theta)},
            {"phi", number(p.direction.phi)},
            {"omega_y", number(c.omega_y)},
            {"omega_z", number(c.omega_z)},
            {"distance_r", number(p.distance_r)},
            {"power", number(p.power)}};
}

json metric(const MetricRecord& r) {
    return {{"trial", r.trial},
            {"snr_db", number(r.snr_db)},
            {"solver", r.solver},
            {"nmse_db", number(r.nmse_db)},
            {"az_exact", r.az_exact},
            {"el_exact", r.el_exact},
            {"r_exact", r.r_exact},
            {"iterations", r.iterations},
            {"runtime_ms", number(r.runtime_ms)},
            {"seed", r.seed}};
}

} // namespace

std::string diagnostics_json(const PipelineOutput& out, bool include_timings) {
    const auto& d = out.diagnostics;
    json pairs = json::array();
    for (const auto& p : d.pairing.pairs)
        pairs.push_back({{"omega_y", number(p.omega_y)},
                         {"omega_z", number(p.omega_z)},
                         {"power", number(p.power)},
                         {"az_index", p.az_index},
                         {"el_index", p.el_index}});
    json dist = json::array();
    for (const auto& e : d.distance.estimates)
        dist.push_back({{"grid_index", e.grid_index}, {"distance_r", number(e.distance_r)}, {"result", recovery(e.result)}});
    json paths = json::array();
    for (const auto& p : out.estimate.paths)
        paths.push_back({{"omega_y", number(p.omega_y)},
                         {"omega_z", number(p.omega_z)},
                         {"distance_r", number(p.distance_r)},
                         {"power", number(p.power)}});
    json doc = {{"azimuth", angle(d.azimuth)},
                {"elevation", angle(d.elevation)},
                {"pairing", {{"pairs", pairs}, {"dropped_az", d.pairing.dropped_az}, {"dropped_el", d.pairing.dropped_el}}},
                {"distance", {{"estimates", dist}, {"residual_norm", number(d.distance.residual_norm)}}},
                {"columns", {{"azimuth", d.az_columns}, {"elevation", d.el_columns}, {"distance", d.r_columns},
                             {"total", d.dictionary_columns()}}},
                {"total_iterations", d.total_iterations},
                {"paths", paths},
                {"nmse_linear", number(out.estimate.nmse_linear)}};
    if (include_timings) {
        json t = json::array();
        for (const auto& s : d.timings)
            t.push_back({{"stage", s.stage}, {"ms", number(s.ms)}});
        doc["timings"] = t;
    }
    return doc.dump(2);
}

std::string ensemble_json(const SnapshotEnsemble& ens) {
    const auto& g = ens.geometry;
    json paths = json::array();
    for (const auto& p : ens.paths)
        paths.push_back(path_param(p));
    json doc = {{"geometry",
                 {{"n_y", g.n_y()}, {"n_z", g.n_z()}, {"spacing", number(g.spacing())}, {"wavelength", number(g.wavelength())}}},
                {"paths", paths},
                {"snapshots", ens.snapshot_count()},
                {"snr_db", number(ens.snr_db)},
                {"noise_variance", number(ens.noise_variance)},
                {"seed", ens.seed},
                {"wavefront", ens.wavefront == Wavefront::exact ? "exact" : "fresnel"},
                {"gain_model", ens.gain_model == GainModel::fixed ? "fixed" : "rayleigh"}};
    return doc.dump(2);
}

void write_json(std::ostream& out, const std::vector<MetricRecord>& records) {
    json arr = json::array();
    for (const auto& r : records)
        arr.push_back(metric(r));
    out << arr.dump(2) << '\n';
}

std::vector<MetricRecord> read_json(std::istream& in) {
    const json arr = json::parse(in);
    if (!arr.is_array())
        throw std::runtime_error("metric JSON must be an array of records");
    std::vector<MetricRecord> out;
    for (const auto& j : arr) {
        MetricRecord r;
        r.trial = j.at("trial").get<int>();
        r.snr_db = read_number(j.at("snr_db"));
        r.solver = j.at("solver").get<std::string>();
        r.nmse_db = read_number(j.at("nmse_db"));
        r.az_exact = j.at("az_exact").get<bool>();
        r.el_exact = j.at("el_exact").get<bool>();
        r.r_exact = j.at("r_exact").get<bool>();
        r.iterations = j.at("iterations").get<int>();
        r.runtime_ms = read_number(j.at("runtime_ms"));
        r.seed = j.at("seed").get<std::uint64_t>();
        out.push_back(std::move(r));
    }
    return out;
}

void write_convergence_json(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
    json arr = json::array();
    for (const auto& r : records)
        arr.push_back({{"trial", r.trial},
                       {"iteration", r.iteration},
                       {"parameter", r.parameter},
                       {"nmse_db", number(r.nmse_db)},
                       {"seed", r.seed}});
    out << arr.dump(2) << '\n';
}

void write_spectra_json(std::ostream& out, const SpectraReport& rep) {
    const auto& s = rep.spectra;
    json angular = json::array();
    for (Eigen::Index iz = 0; iz < s.angular.rows(); ++iz) {
        json row = json::array();
        for (Eigen::Index iy = 0; iy < s.angular.cols(); ++iy)
            row.push_back(number(s.angular(iz, iy)));
        angular.push_back(row);
    }
    json distance = json::array();
    for (double v : s.distance)
        distance.push_back(number(v));
    json paths = json::array();
    for (const auto& p : rep.paths)
        paths.push_back(path_param(p));
    json r_grid = json::array();
    for (double v : rep.r_grid.values())
        r_grid.push_back(number(v));
    const json doc = {{"paths", paths},
                      {"az_grid", rep.az_grid.values()},
                      {"el_grid", rep.el_grid.values()},
                      {"r_grid", r_grid},
                      {"angular", angular},
                      {"angular_peak", {{"az_index", s.az_peak}, {"el_index", s.el_peak}}},
                      {"distance_direction", {{"omega_y", s.distance_direction.omega_y}, {"omega_z", s.distance_direction.omega_z}}},
                      {"distance", distance},
                      {"distance_peak", s.r_peak},
                      {"truth", {{"az_index", rep.true_az}, {"el_index", rep.true_el}, {"r_index", rep.true_r}}},
                      {"angle_peak_off", rep.angle_peak_off},
                      {"distance_peak_off", rep.distance_peak_off},
                      {"dere", {{"az_exact", rep.dere.az}, {"el_exact", rep.dere.el}, {"r_exact", rep.dere.r},
                                {"nmse_db", number(rep.dere_nmse_db)}}}};
    out << doc.dump(2) << '\n';
}

void write_oracle_json(std::ostream& out, const OracleReport& rep) {
    const json doc = {{"instances", rep.instances},
                      {"dere_exact", rep.dere_exact},
                      {"oracle_exact", rep.oracle_exact},
                      {"agree", rep.agree},
                      {"worst_nmse_db", number(rep.worst_nmse_db)},
                      {"dere_columns", rep.dere_columns},
                      {"oracle_columns", rep.oracle_columns},
                      {"dere_ms", number(rep.dere_ms)},
                      {"oracle_ms", number(rep.oracle_ms)},
                      {"counterexamples", rep.counterexamples}};
    out << doc.dump(2) << '\n';
}

} // namespace dere
