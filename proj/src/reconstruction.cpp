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

#include "dere/reconstruction.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace dere {

namespace {

std::vector<AngleAtom> strongest(std::vector<AngleAtom> atoms, std::size_t keep) {
    if (atoms.size() <= keep)
        return atoms;
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return atoms[a].power > atoms[b].power; });
    order.resize(keep);
    std::sort(order.begin(), order.end());  // keep the caller's ordering
    std::vector<AngleAtom> out;
    for (std::size_t i : order)
        out.push_back(atoms[i]);
    return out;
}

PairedDirection make_pair(const AngleAtom& a, const AngleAtom& e) {
    return {a.omega, e.omega, 0.5 * (a.power + e.power), a.grid_index, e.grid_index};
}

} // namespace

PairingResult match_angle_pairs(const std::vector<AngleAtom>& az_in, const std::vector<AngleAtom>& el_in,
                                PairingRule rule) {
    if (az_in.empty() || el_in.empty())
        throw std::invalid_argument("angle pairing needs at least one azimuth and one elevation atom");
    const std::size_t L = std::min(az_in.size(), el_in.size());
    PairingResult out;
    out.dropped_az = az_in.size() - L;
    out.dropped_el = el_in.size() - L;
    const std::vector<AngleAtom> az = strongest(az_in, L);
    const std::vector<AngleAtom> el = strongest(el_in, L);

    std::vector<std::size_t> partner(L);
    if (rule == PairingRule::greedy) {
        struct Candidate {
            double gap;
            std::size_t i, j;
        };
        std::vector<Candidate> cand;
        cand.reserve(L * L);
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < L; ++j)
                cand.push_back({std::abs(az[i].power - el[j].power), i, j});
        std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.gap < b.gap; });
        std::vector<char> az_used(L, 0), el_used(L, 0);
        for (const auto& c : cand) {
            if (az_used[c.i] || el_used[c.j])
                continue;
            az_used[c.i] = el_used[c.j] = 1;
            partner[c.i] = c.j;
        }
    } else {
        std::vector<std::size_t> perm(L);
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            double cost = 0.0;
            for (std::size_t i = 0; i < L; ++i)
                cost += std::abs(az[i].power - el[perm[i]].power);
            if (cost < best) {
                best = cost;
                partner = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    for (std::size_t i = 0; i < L; ++i)
        out.pairs.push_back(make_pair(az[i], el[partner[i]]));
    return out;
}

namespace {

Eigen::MatrixXcd estimate_columns(const ArrayGeometry& geom, const std::vector<PathEstimate>& paths) {
    Eigen::MatrixXcd A(geom.element_count(), Eigen::Index(paths.size()));
    for (std::size_t l = 0; l < paths.size(); ++l)
        A.col(Eigen::Index(l)) = vectorize(steering_fresnel(geom, paths[l].omega_y, paths[l].omega_z, paths[l].distance_r));
    return A;
}

} // namespace

Eigen::MatrixXcd estimate_gains(const SnapshotEnsemble& ens, const std::vector<PathEstimate>& paths) {
    if (paths.empty())
        throw std::invalid_argument("gain estimation needs at least one path");
    const Eigen::MatrixXcd A = estimate_columns(ens.geometry, paths);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    if (qr.rank() < A.cols()) {
        std::size_t bi = 0, bj = 1;
        double best = -1.0;
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            for (Eigen::Index i = 0; i < j; ++i) {
                const double c = std::abs(A.col(i).dot(A.col(j))) / (A.col(i).norm() * A.col(j).norm());
                if (c > best) {
                    best = c;
                    bi = std::size_t(i);
                    bj = std::size_t(j);
                }
            }
        throw RankError("steering matrix is rank deficient: estimated paths " + std::to_string(bi) + " and " +
                        std::to_string(bj) + " collide");
    }
    return qr.solve(ens.observations).transpose();
}

Eigen::MatrixXcd reconstruct_channel(const std::vector<PathEstimate>& paths, const Eigen::MatrixXcd& gains,
                                     const ArrayGeometry& geom) {
    if (gains.cols() != Eigen::Index(paths.size()))
        throw DimensionError("gain matrix must have one column per path");
    if (paths.empty())
        return Eigen::MatrixXcd::Zero(geom.element_count(), gains.rows());
    return estimate_columns(geom, paths) * gains.transpose();
}

Nmse nmse(const Eigen::MatrixXcd& estimate, const Eigen::MatrixXcd& truth) {
    if (truth.size() == 0 || estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw DimensionError("NMSE needs matching, non-empty snapshot sets");
    const double ref = truth.squaredNorm();
    if (!(ref > 0.0))
        throw std::domain_error("NMSE is undefined for zero-energy truth");
    const double lin = (estimate - truth).squaredNorm() / ref;
    return {lin, 10.0 * std::log10(lin)};
}

Nmse nmse(const std::vector<ChannelMatrix>& estimate, const std::vector<ChannelMatrix>& truth) {
    if (truth.empty() || estimate.size() != truth.size())
        throw DimensionError("NMSE needs matching, non-empty snapshot lists");
    double err = 0.0, ref = 0.0;
    for (std::size_t t = 0; t < truth.size(); ++t) {
        if (estimate[t].rows() != truth[t].rows() || estimate[t].cols() != truth[t].cols())
            throw DimensionError("NMSE snapshot shapes differ");
        err += (estimate[t] - truth[t]).squaredNorm();
        ref += truth[t].squaredNorm();
    }
    if (!(ref > 0.0))
        throw std::domain_error("NMSE is undefined for zero-energy truth");
    const double lin = err / ref;
    return {lin, 10.0 * std::log10(lin)};
}

PipelineConfig default_pipeline_config(const ArrayGeometry& geom, int num_paths, double r_min, double r_max,
                                       int r_count, std::optional<double> omega_max) {
    const double dl = geom.spacing_over_wavelength();
    const int ny = std::max(geom.n_y(), 2);
    const int nz = std::max(geom.n_z(), 2);
    PipelineConfig cfg{angle_grid(GridKind::azimuth, ny, omega_max.value_or(dft_omega_max(ny, dl)), dl),
                       angle_grid(GridKind::elevation, nz, omega_max.value_or(dft_omega_max(nz, dl)), dl),
                       distance_grid(r_min, r_max, r_count)};
    cfg.num_paths = num_paths;
    return cfg;
}

namespace {

class StageClock {
  public:
    explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink), t0_(std::chrono::steady_clock::now()) {}
    void lap(const char* stage) {
        const auto now = std::chrono::steady_clock::now();
        sink_.push_back({stage, std::chrono::duration<double, std::milli>(now - t0_).count()});
        t0_ = now;
    }

  private:
    std::vector<StageTiming>& sink_;
    std::chrono::steady_clock::time_point t0_;
};

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

} // namespace

PipelineOutput dere_pipeline(const SnapshotEnsemble& ens, const PipelineConfig& cfg) {
    if (cfg.num_paths < 1)
        throw StageError("config", "num_paths must be at least 1");
    const auto& geom = ens.geometry;
    PipelineOutput out;
    auto& diag = out.diagnostics;
    StageClock clock(diag.timings);

    SolverConfig angle_solver;
    angle_solver.solver = cfg.solver;
    angle_solver.sbl = cfg.sbl;
    switch (cfg.stop_mode) {
    case StoppingRule::Mode::fixed_sparsity:
        angle_solver.stop = StoppingRule::fixed(cfg.num_paths);
        break;
    case StoppingRule::Mode::residual_threshold:
        angle_solver.stop = StoppingRule::residual(cfg.residual_epsilon, cfg.max_atoms);
        break;
    case StoppingRule::Mode::combined:
        angle_solver.stop = StoppingRule::combined(cfg.num_paths, cfg.residual_epsilon);
        break;
    }

    const SparseFunctionSet sf = stage("decomposition", [&] { return decompose(ens, cfg.decomposition); });
    clock.lap("decomposition");

    const double dl = geom.spacing_over_wavelength();
    const Dictionary dict_az = stage("dictionaries", [&] { return angle_dictionary(geom.n_y(), dl, cfg.az_grid); });
    const Dictionary dict_el = stage("dictionaries", [&] { return angle_dictionary(geom.n_z(), dl, cfg.el_grid); });
    diag.az_columns = dict_az.size();
    diag.el_columns = dict_el.size();
    clock.lap("dictionaries");

    diag.azimuth = stage("recover_azimuth", [&] { return recover_azimuth(sf.W_theta, dict_az, angle_solver, cfg.az_rows); });
    diag.elevation =
        stage("recover_elevation", [&] { return recover_elevation(sf.W_phi, dict_el, angle_solver, cfg.el_cols); });
    clock.lap("angle_recovery");

    diag.pairing = stage("match_angle_pairs",
                         [&] { return match_angle_pairs(diag.azimuth.atoms, diag.elevation.atoms, cfg.pairing); });
    clock.lap("pairing");

    diag.distance = stage("recover_distance",
                          [&] { return recover_distance(sf.W_r, diag.pairing.pairs, geom, cfg.r_grid, angle_solver); });
    diag.r_columns = diag.distance.dictionary_columns;
    clock.lap("distance_recovery");

    auto& est = out.estimate;
    for (std::size_t l = 0; l < diag.pairing.pairs.size(); ++l) {
        const auto& p = diag.pairing.pairs[l];
        est.paths.push_back({p.omega_y, p.omega_z, diag.distance.estimates[l].distance_r, p.power, std::nullopt});
    }
    const Eigen::MatrixXcd gains = stage("estimate_gains", [&] { return estimate_gains(ens, est.paths); });
    for (std::size_t l = 0; l < est.paths.size(); ++l) {
        const auto col = gains.col(Eigen::Index(l));
        est.paths[l].gain_per_snapshot = std::vector<cd>(col.data(), col.data() + col.size());
    }
    clock.lap("gains");

    est.rebuilt_snapshots = stage("reconstruct_channel", [&] { return reconstruct_channel(est.paths, gains, geom); });
    est.nmse_linear = stage("nmse", [&] { return nmse(est.rebuilt_snapshots, ens.clean).linear; });
    clock.lap("reconstruction");

    diag.total_iterations = diag.azimuth.result.iterations + diag.elevation.result.iterations;
    for (const auto& d : diag.distance.estimates)
        diag.total_iterations += d.result.iterations;
    return out;
}

JointDictionary build_joint_dictionary(const ArrayGeometry& geom, const ParameterGrid& az, const ParameterGrid& el,
                                       const ParameterGrid& r, std::size_t cap) {
    const std::size_t total = az.count() * el.count() * r.count();
    if (total > cap)
        throw GridError("joint dictionary would have " + std::to_string(total) + " columns (cap " +
                        std::to_string(cap) + "); use smaller grids");
    JointDictionary out;
    out.az = az.values();
    out.el = el.values();
    out.r = r.values();
    out.columns.resize(geom.element_count(), Eigen::Index(total));
    const double amp = 1.0 / std::sqrt(double(geom.element_count()));
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < az.count(); ++i)
        for (std::size_t j = 0; j < el.count(); ++j) {
            if (!cosines_realizable(az[i], el[j]))
                throw GridError("joint grid contains an unrealizable direction");
            for (std::size_t k = 0; k < r.count(); ++k) {
                out.columns.col(c++) = amp * vectorize(steering_fresnel(geom, az[i], el[j], r[k]));
                out.indices.push_back({i, j, k});
            }
        }
    return out;
}

std::vector<OracleTriple> joint_3d_oracle(const ChannelMatrix& W_r, const JointDictionary& dict, int num_paths) {
    const Eigen::MatrixXcd y = vectorize(W_r);
    const RecoveryResult res = omp(y, dict.columns, StoppingRule::fixed(num_paths));
    std::vector<OracleTriple> out;
    for (Eigen::Index s : res.support) {
        const auto& idx = dict.indices[std::size_t(s)];
        out.push_back({idx[0], idx[1], idx[2], dict.az[idx[0]], dict.el[idx[1]], dict.r[idx[2]]});
    }
    return out;
}

std::vector<OracleTriple> joint_3d_oracle(const SnapshotEnsemble& ens, const ParameterGrid& az, const ParameterGrid& el,
                                          const ParameterGrid& r, int num_paths, std::size_t cap) {
    const JointDictionary dict = build_joint_dictionary(ens.geometry, az, el, r, cap);
    return joint_3d_oracle(covariance_origin(ens), dict, num_paths);
}

} // namespace dere
