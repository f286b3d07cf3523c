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

#include "dere/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

namespace dere {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int resolve_threads(int requested, int configured) {
    const int t = requested >= 0 ? requested : configured;
    if (t > 0)
        return t;
    return std::max(1, int(std::thread::hardware_concurrency()));
}

// Runs fn(i) for i in [0, n); each call writes only its own output slot.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const auto workers = std::min<std::size_t>(std::size_t(threads), n);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
                fn(i);
        });
    for (auto& t : pool)
        t.join();
}

double to_db(double linear) { return 10.0 * std::log10(std::max(linear, 1e-30)); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Bins {
    std::size_t az, el, r;
    auto operator<=>(const Bins&) const = default;
};

std::multiset<Bins> truth_bins(const std::vector<PathParam>& truth, const PipelineConfig& cfg) {
    std::multiset<Bins> out;
    for (const auto& p : truth) {
        const Cosines c = p.cosines();
        out.insert({cfg.az_grid.nearest(c.omega_y), cfg.el_grid.nearest(c.omega_z), cfg.r_grid.nearest(p.distance_r)});
    }
    return out;
}

std::multiset<Bins> estimate_bins(const std::vector<PathEstimate>& est, const PipelineConfig& cfg) {
    std::multiset<Bins> out;
    for (const auto& p : est)
        out.insert({cfg.az_grid.nearest(p.omega_y), cfg.el_grid.nearest(p.omega_z), cfg.r_grid.nearest(p.distance_r)});
    return out;
}

std::vector<double> default_powers(const ExperimentConfig& cfg) {
    std::vector<double> p(std::size_t(cfg.scene.paths));
    for (std::size_t l = 0; l < p.size(); ++l)
        p[l] = cfg.scene.power_profile == PowerProfile::equal ? 1.0 : std::pow(cfg.scene.power_ratio, double(l));
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p)
        v /= total;
    return p;
}

} // namespace

std::uint64_t child_seed(std::uint64_t master, std::uint64_t snr_index, std::uint64_t trial) {
    return splitmix64(splitmix64(splitmix64(master) ^ snr_index) ^ trial);
}

bool MetricRecord::operator==(const MetricRecord& o) const {
    const bool same_nmse = (failed() && o.failed()) || nmse_db == o.nmse_db;
    return trial == o.trial && snr_db == o.snr_db && solver == o.solver && same_nmse && az_exact == o.az_exact &&
           el_exact == o.el_exact && r_exact == o.r_exact && iterations == o.iterations &&
           runtime_ms == o.runtime_ms && seed == o.seed;
}

SupportMatch support_match(const std::vector<PathParam>& truth, const std::vector<PathEstimate>& estimate,
                           const PipelineConfig& cfg) {
    SupportMatch m;
    if (truth.size() != estimate.size())
        return m;
    std::vector<std::size_t> ta, te, ea, ee;
    for (const auto& p : truth) {
        const Cosines c = p.cosines();
        ta.push_back(cfg.az_grid.nearest(c.omega_y));
        te.push_back(cfg.el_grid.nearest(c.omega_z));
    }
    for (const auto& p : estimate) {
        ea.push_back(cfg.az_grid.nearest(p.omega_y));
        ee.push_back(cfg.el_grid.nearest(p.omega_z));
    }
    std::sort(ta.begin(), ta.end());
    std::sort(te.begin(), te.end());
    std::sort(ea.begin(), ea.end());
    std::sort(ee.begin(), ee.end());
    m.az = ta == ea;
    m.el = te == ee;
    // distances only count once paired to the right direction
    m.r = truth_bins(truth, cfg) == estimate_bins(estimate, cfg);
    return m;
}

SnapshotEnsemble draw_trial(const ExperimentConfig& cfg, const PipelineConfig& pipeline, std::uint64_t seed,
                            double snr_db) {
    Rng rng(seed);
    const std::vector<PathParam> paths = generate_paths(rng, cfg.scene_spec(pipeline));
    return generate_snapshots(cfg.array(), paths, cfg.estimation.snapshots, snr_db, cfg.scene.wavefront,
                              splitmix64(seed), cfg.scene.gain_model);
}

SweepResult run_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto t0 = Clock::now();
    const std::vector<Solver> solvers = cfg.solvers();
    std::vector<PipelineConfig> pipelines;
    for (Solver s : solvers)
        pipelines.push_back(cfg.pipeline(s));

    const std::size_t n_snr = cfg.sweep.snr_db.size();
    const std::size_t trials = std::size_t(cfg.sweep.trials);
    std::vector<std::vector<MetricRecord>> slots(n_snr * trials);
    std::vector<std::string> errors(n_snr * trials);

    parallel_for(slots.size(), resolve_threads(opt.threads, cfg.sweep.threads), [&](std::size_t task) {
        const std::size_t si = task / trials, trial = task % trials;
        const double snr = cfg.sweep.snr_db[si];
        const std::uint64_t seed = child_seed(cfg.seed, si, trial);
        auto& out = slots[task];
        for (std::size_t k = 0; k < solvers.size(); ++k) {
            MetricRecord rec;
            rec.trial = int(trial);
            rec.snr_db = snr;
            rec.solver = to_string(solvers[k]);
            rec.seed = seed;
            out.push_back(rec);
        }
        try {
            const SnapshotEnsemble ens = draw_trial(cfg, pipelines.front(), seed, snr);
            for (std::size_t k = 0; k < solvers.size(); ++k) {
                auto& rec = out[k];
                const auto start = Clock::now();
                try {
                    const PipelineOutput res = dere_pipeline(ens, pipelines[k]);
                    rec.nmse_db = 10.0 * std::log10(res.estimate.nmse_linear);
                    if (std::isinf(rec.nmse_db))
                        rec.nmse_db = kNmseFloorDb;
                    const SupportMatch m = support_match(ens.paths, res.estimate.paths, pipelines[k]);
                    rec.az_exact = m.az;
                    rec.el_exact = m.el;
                    rec.r_exact = m.r;
                    rec.iterations = res.diagnostics.total_iterations;
                } catch (const std::exception& e) {
                    rec.nmse_db = std::numeric_limits<double>::quiet_NaN();
                    errors[task] = e.what();
                }
                if (opt.timing)
                    rec.runtime_ms = ms_since(start);
            }
        } catch (const std::exception& e) {
            for (auto& rec : out)
                rec.nmse_db = std::numeric_limits<double>::quiet_NaN();
            errors[task] = e.what();
        }
    });

    SweepResult result;
    for (auto& s : slots)
        for (auto& r : s)
            result.records.push_back(std::move(r));
    std::stable_sort(result.records.begin(), result.records.end(), [](const MetricRecord& a, const MetricRecord& b) {
        if (a.snr_db != b.snr_db)
            return a.snr_db < b.snr_db;
        if (a.trial != b.trial)
            return a.trial < b.trial;
        return a.solver < b.solver;
    });

    auto& sum = result.summary;
    sum.records = result.records.size();
    sum.failures = std::size_t(std::count_if(result.records.begin(), result.records.end(),
                                             [](const MetricRecord& r) { return r.failed(); }));
    sum.failure_rate = sum.records ? double(sum.failures) / double(sum.records) : 0.0;
    for (std::size_t i = 0; i < errors.size() && sum.failure_messages.size() < 10; ++i)
        if (!errors[i].empty())
            sum.failure_messages.push_back("snr " + format_number(cfg.sweep.snr_db[i / trials]) + " trial " +
                                           std::to_string(i % trials) + ": " + errors[i]);
    const auto& p = pipelines.front();
    sum.dere_columns = p.az_grid.count() + p.el_grid.count() + std::size_t(p.num_paths) * p.r_grid.count();
    sum.oracle_columns = p.az_grid.count() * p.el_grid.count() * p.r_grid.count();
    sum.wall_ms = ms_since(t0);
    return result;
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg, const RunOptions& opt) {
    const PipelineConfig base = cfg.pipeline(Solver::vbi);
    const int seeds = cfg.converge.seeds;
    const int K = cfg.converge.max_iter;
    static const char* const kParams[] = {"omega_y", "omega_z", "r", "channel"};

    std::vector<std::vector<ConvergenceRecord>> slots(static_cast<std::size_t>(seeds));
    std::vector<char> failed(static_cast<std::size_t>(seeds), 0);
    parallel_for(slots.size(), resolve_threads(opt.threads, cfg.sweep.threads), [&](std::size_t s) {
        const std::uint64_t seed = child_seed(cfg.seed, 0, s);
        try {
            const SnapshotEnsemble ens = draw_trial(cfg, base, seed, cfg.converge.snr_db);
            for (int k = 1; k <= K; ++k) {
                PipelineConfig pc = base;
                pc.sbl.max_iter = k;
                const PipelineOutput res = dere_pipeline(ens, pc);

                double ey = 0, ny = 0, ez = 0, nz = 0, er = 0, nr = 0;
                for (const auto& t : ens.paths) {
                    const Cosines c = t.cosines();
                    const PathEstimate* best = nullptr;
                    double gap = std::numeric_limits<double>::infinity();
                    for (const auto& e : res.estimate.paths) {
                        const double g = std::hypot(e.omega_y - c.omega_y, e.omega_z - c.omega_z);
                        if (g < gap) {
                            gap = g;
                            best = &e;
                        }
                    }
                    ey += std::pow(best->omega_y - c.omega_y, 2);
                    ny += c.omega_y * c.omega_y;
                    ez += std::pow(best->omega_z - c.omega_z, 2);
                    nz += c.omega_z * c.omega_z;
                    // far-field markers compare in 1/r
                    const bool inv = is_far_field(t.distance_r) || is_far_field(best->distance_r);
                    const double a = inv ? 1.0 / best->distance_r : best->distance_r;
                    const double b = inv ? 1.0 / t.distance_r : t.distance_r;
                    er += (a - b) * (a - b);
                    nr += b * b;
                }
                const double vals[] = {to_db(ey / (ny > 0 ? ny : 1.0)), to_db(ez / (nz > 0 ? nz : 1.0)),
                                       to_db(er / (nr > 0 ? nr : 1.0)), to_db(res.estimate.nmse_linear)};
                for (int p = 0; p < 4; ++p)
                    slots[s].push_back({int(s), k, kParams[p], vals[p], seed});
            }
        } catch (const std::exception&) {
            slots[s].clear();
            failed[s] = 1;
        }
    });

    ConvergenceResult out;
    out.failures = std::size_t(std::count(failed.begin(), failed.end(), 1));
    for (auto& s : slots)
        for (auto& r : s)
            out.records.push_back(std::move(r));
    for (int k = 1; k <= K; ++k)
        for (int p = 0; p < 4; ++p) {
            std::vector<double> v;
            for (const auto& r : out.records)
                if (r.iteration == k && r.parameter == kParams[p])
                    v.push_back(r.nmse_db);
            if (!v.empty())
                out.median.push_back({-1, k, kParams[p], median(v), 0});
        }
    return out;
}

SpectraReport run_spectra(const ExperimentConfig& cfg, std::uint64_t seed) {
    const std::vector<Solver> solvers = cfg.solvers();
    const PipelineConfig pc = cfg.pipeline(solvers.front());
    SceneSpec scene = cfg.scene_spec(pc);
    scene.num_paths = cfg.spectra.paths;
    const double r_true = pc.r_grid[pc.r_grid.nearest(cfg.spectra.distance_r)];

    Rng rng(seed);
    std::vector<PathParam> paths = generate_paths(rng, scene);
    for (auto& p : paths)
        p.distance_r = r_true;
    const SnapshotEnsemble ens = generate_snapshots(cfg.array(), paths, cfg.estimation.snapshots, cfg.spectra.snr_db,
                                                    cfg.scene.wavefront, splitmix64(seed), cfg.scene.gain_model);

    SpectrumRequest req;
    req.az_cosines = pc.az_grid.values();
    req.el_cosines = pc.el_grid.values();
    req.distances = pc.r_grid.values();
    req.fixed_r = kFarField;

    SpectraReport rep{paths, power_spectrum_diagnostics(ens, req), pc.az_grid, pc.el_grid, pc.r_grid, 0, 0, 0,
                      false, false, {}, 0.0};
    const auto strongest = std::max_element(paths.begin(), paths.end(), [](const PathParam& a, const PathParam& b) {
        return a.power < b.power;
    });
    const Cosines c = strongest->cosines();
    rep.true_az = pc.az_grid.nearest(c.omega_y);
    rep.true_el = pc.el_grid.nearest(c.omega_z);
    rep.true_r = pc.r_grid.nearest(strongest->distance_r);
    rep.angle_peak_off =
        std::size_t(rep.spectra.az_peak) != rep.true_az || std::size_t(rep.spectra.el_peak) != rep.true_el;
    rep.distance_peak_off = std::size_t(rep.spectra.r_peak) != rep.true_r;

    PipelineConfig dc = pc;
    dc.num_paths = cfg.spectra.paths;
    const PipelineOutput res = dere_pipeline(ens, dc);
    rep.dere = support_match(paths, res.estimate.paths, dc);
    rep.dere_nmse_db = to_db(res.estimate.nmse_linear);
    return rep;
}

namespace {

void combinations(int n, int k, int gap, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (int(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    const int start = cur.empty() ? 0 : cur.back() + gap;
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        combinations(n, k, gap, cur, out);
        cur.pop_back();
    }
}

} // namespace

OracleReport run_oracle_suite(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto& ob = cfg.oracle;
    const int L = cfg.scene.paths;
    const int gap = std::max(1, cfg.scene.min_separation_bins);
    const double lambda = 299792458.0 / cfg.geometry.carrier_hz;
    const ArrayGeometry geom(ob.n, ob.n, cfg.geometry.d_over_lambda * lambda, lambda);
    const double dl = cfg.geometry.d_over_lambda;
    PipelineConfig pc{angle_grid(GridKind::azimuth, ob.angle_points, dft_omega_max(ob.angle_points, dl), dl),
                      angle_grid(GridKind::elevation, ob.angle_points, dft_omega_max(ob.angle_points, dl), dl),
                      distance_grid(ob.r_min, ob.r_max, ob.r_points)};
    pc.num_paths = L;
    pc.solver = cfg.solvers().front();
    pc.sbl.update = cfg.estimation.sbl_update;
    pc.pairing = cfg.estimation.pairing;
    const JointDictionary joint = build_joint_dictionary(geom, pc.az_grid, pc.el_grid, pc.r_grid);

    std::vector<std::vector<int>> combos;
    std::vector<int> cur;
    combinations(ob.angle_points, L, gap, cur, combos);
    std::vector<std::vector<int>> perms;
    std::vector<int> perm(static_cast<std::size_t>(L));
    std::iota(perm.begin(), perm.end(), 0);
    do
        perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    std::size_t r_tuples = 1;
    for (int l = 0; l < L; ++l)
        r_tuples *= std::size_t(ob.r_points);

    const std::vector<double> powers = default_powers(cfg);
    const std::size_t placements = combos.size() * combos.size() * perms.size();
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < placements; i += std::size_t(ob.stride))
        chosen.push_back(i);

    struct Outcome {
        bool dere = false, oracle = false, agree = false;
        double nmse_db = 0.0, dere_ms = 0.0, oracle_ms = 0.0;
        std::size_t dere_columns = 0;
        std::string note;
    };
    std::vector<Outcome> outcomes(chosen.size());

    parallel_for(chosen.size(), resolve_threads(opt.threads, cfg.sweep.threads), [&](std::size_t j) {
        const std::size_t i = chosen[j];
        const auto& az = combos[i / (combos.size() * perms.size())];
        const auto& el = combos[(i / perms.size()) % combos.size()];
        const auto& pm = perms[i % perms.size()];
        std::size_t rt = i % r_tuples;
        const auto& power_order = perms[(i / r_tuples) % perms.size()];

        std::vector<PathParam> paths;
        std::multiset<Bins> truth;
        for (int l = 0; l < L; ++l) {
            const std::size_t ri = rt % std::size_t(ob.r_points);
            rt /= std::size_t(ob.r_points);
            const std::size_t ai = std::size_t(az[std::size_t(l)]), ei = std::size_t(el[std::size_t(pm[std::size_t(l)])]);
            paths.push_back({direction_from_cosines(pc.az_grid[ai], pc.el_grid[ei]), pc.r_grid[ri],
                             powers[std::size_t(power_order[std::size_t(l)])]});
            truth.insert({ai, ei, ri});
        }
        Outcome& o = outcomes[j];
        try {
            const SnapshotEnsemble ens = generate_snapshots(geom, paths, ob.snapshots, kFarField, cfg.scene.wavefront,
                                                            child_seed(cfg.seed, 0x6f7261636c65ULL, i),
                                                            cfg.scene.gain_model);
            auto start = Clock::now();
            const PipelineOutput res = dere_pipeline(ens, pc);
            o.dere_ms = ms_since(start);
            o.dere_columns = res.diagnostics.dictionary_columns();
            o.nmse_db = 10.0 * std::log10(std::max(res.estimate.nmse_linear, 1e-300));
            const std::multiset<Bins> dere_bins = estimate_bins(res.estimate.paths, pc);
            o.dere = dere_bins == truth && o.nmse_db <= -40.0;

            start = Clock::now();
            const std::vector<OracleTriple> triples = joint_3d_oracle(covariance_origin(ens), joint, L);
            o.oracle_ms = ms_since(start);
            std::multiset<Bins> oracle_bins;
            for (const auto& t : triples)
                oracle_bins.insert({t.az, t.el, t.r});
            o.oracle = oracle_bins == truth;
            o.agree = oracle_bins == dere_bins;
        } catch (const std::exception& e) {
            o.note = e.what();
        }
        if (!o.dere || !o.oracle || !o.agree) {
            std::string s = "placement " + std::to_string(i) + " az";
            for (int l = 0; l < L; ++l)
                s += " " + std::to_string(az[std::size_t(l)]);
            s += " el";
            for (int l = 0; l < L; ++l)
                s += " " + std::to_string(el[std::size_t(pm[std::size_t(l)])]);
            s += o.dere ? "" : " dere-miss";
            s += o.oracle ? "" : " oracle-miss";
            s += o.agree ? "" : " disagree";
            if (!o.note.empty())
                s += " (" + o.note + ")";
            o.note = s;
        }
    });

    OracleReport rep;
    rep.instances = outcomes.size();
    rep.oracle_columns = std::size_t(joint.columns.cols());
    for (const auto& o : outcomes) {
        rep.dere_exact += o.dere;
        rep.oracle_exact += o.oracle;
        rep.agree += o.agree;
        rep.worst_nmse_db = std::max(rep.worst_nmse_db, o.nmse_db);
        rep.dere_ms += o.dere_ms;
        rep.oracle_ms += o.oracle_ms;
        rep.dere_columns = std::max(rep.dere_columns, o.dere_columns);
        if (!o.note.empty() && rep.counterexamples.size() < 10)
            rep.counterexamples.push_back(o.note);
    }
    return rep;
}

std::string format_number(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_csv(std::ostream& out, const std::vector<MetricRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records)
        out << r.trial << ',' << format_number(r.snr_db) << ',' << r.solver << ',' << format_number(r.nmse_db) << ','
            << (r.az_exact ? "true" : "false") << ',' << (r.el_exact ? "true" : "false") << ','
            << (r.r_exact ? "true" : "false") << ',' << r.iterations << ',' << format_number(r.runtime_ms) << ','
            << r.seed << '\n';
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
    out << "trial,iteration,parameter,nmse_db,seed\n";
    for (const auto& r : records)
        out << r.trial << ',' << r.iteration << ',' << r.parameter << ',' << format_number(r.nmse_db) << ',' << r.seed
            << '\n';
}

void write_spectra_csv(std::ostream& out, const SpectraReport& rep) {
    out << "spectrum,az_index,el_index,r_index,omega_y,omega_z,distance_r,power\n";
    const auto& s = rep.spectra;
    for (Eigen::Index iz = 0; iz < s.angular.rows(); ++iz)
        for (Eigen::Index iy = 0; iy < s.angular.cols(); ++iy)
            out << "angular," << iy << ',' << iz << ",," << format_number(rep.az_grid[std::size_t(iy)]) << ','
                << format_number(rep.el_grid[std::size_t(iz)]) << ",inf," << format_number(s.angular(iz, iy)) << '\n';
    for (std::size_t i = 0; i < s.distance.size(); ++i)
        out << "distance," << s.az_peak << ',' << s.el_peak << ',' << i << ','
            << format_number(s.distance_direction.omega_y) << ',' << format_number(s.distance_direction.omega_z)
            << ',' << format_number(rep.r_grid[i]) << ',' << format_number(s.distance[i]) << '\n';
}

void emit(const std::vector<MetricRecord>& records, const std::string& format, const std::string& path) {
    if (records.empty())
        throw std::invalid_argument("no records to emit");
    if (format != "csv" && format != "json")
        throw std::invalid_argument("unknown output format '" + format + "' (expected csv or json)");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    if (format == "csv")
        write_csv(out, records);
    else
        write_json(out, records);
    if (!out)
        throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace dere
