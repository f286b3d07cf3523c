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

#include "dere/recovery.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace dere {

namespace {

void check_dimensions(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& dict) {
    if (dict.cols() < 1)
        throw DimensionError("dictionary has no columns");
    if (Y.rows() != dict.rows())
        throw DimensionError("measurement length " + std::to_string(Y.rows()) + " does not match axis length " +
                             std::to_string(dict.rows()));
    if (Y.cols() < 1)
        throw DimensionError("at least one measurement vector is required");
}

Eigen::MatrixXcd gather(const Eigen::MatrixXcd& dict, const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXcd out(dict.rows(), Eigen::Index(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.col(Eigen::Index(i)) = dict.col(idx[i]);
    return out;
}

} // namespace

RecoveryResult omp(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& dict, const StoppingRule& stop) {
    check_dimensions(Y, dict);
    using Mode = StoppingRule::Mode;
    const bool by_count = stop.mode != Mode::residual_threshold;
    const bool by_residual = stop.mode != Mode::fixed_sparsity;
    if (by_count && stop.sparsity < 1)
        throw DimensionError("fixed-sparsity stopping needs L >= 1");
    if (by_count && stop.sparsity > dict.cols())
        throw DimensionError("stopping rule asks for " + std::to_string(stop.sparsity) + " atoms but the dictionary has " +
                             std::to_string(dict.cols()) + " columns");
    if (by_residual && stop.epsilon < 0.0)
        throw DimensionError("residual threshold must be non-negative");

    const Eigen::Index cap = by_count ? stop.sparsity
                                      : std::min<Eigen::Index>({Eigen::Index(stop.max_iterations), dict.cols(), dict.rows()});
    const double y_norm = Y.norm();

    RecoveryResult res;
    res.coefficients.resize(0, Y.cols());
    Eigen::MatrixXcd R = Y;
    res.residual_norm = y_norm;
    std::vector<char> used(std::size_t(dict.cols()), 0);

    while (Eigen::Index(res.support.size()) < cap) {
        if (by_residual && res.residual_norm <= stop.epsilon * y_norm)
            break;
        const Eigen::VectorXd score = (dict.adjoint() * R).cwiseAbs().rowwise().sum();
        Eigen::Index pick = -1;
        double best = -1.0;
        for (Eigen::Index i = 0; i < score.size(); ++i) {
            if (used[std::size_t(i)])
                continue;
            if (score(i) > best) {
                best = score(i);
                pick = i;
            }
        }
        if (pick < 0)
            break;
        used[std::size_t(pick)] = 1;
        res.support.push_back(pick);

        const Eigen::MatrixXcd A = gather(dict, res.support);
        res.coefficients = A.colPivHouseholderQr().solve(Y);
        R = Y - A * res.coefficients;
        res.residual_norm = R.norm();
        res.trace.push_back(res.residual_norm);
        ++res.iterations;
    }
    return res;
}

RecoveryResult omp(const Eigen::MatrixXcd& Y, const Dictionary& dict, const StoppingRule& stop) {
    return omp(Y, dict.columns(), stop);
}

RecoveryResult sbl_vbi(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& dict, const SblOptions& opt) {
    check_dimensions(Y, dict);
    if (opt.max_iter < 1)
        throw DimensionError("SBL needs max_iter >= 1");

    const Eigen::Index N = dict.rows(), M = dict.cols(), K = Y.cols();
    RecoveryResult res;
    res.coefficients.resize(0, K);
    const double power = Y.squaredNorm() / double(N * K);
    if (!(power > 0.0)) {
        res.residual_norm = 0.0;
        return res;
    }
    const double scale = std::sqrt(power);
    const Eigen::MatrixXcd Yn = Y / scale;
    const double y2 = Yn.squaredNorm();

    constexpr double kGammaFloor = 1e-200;
    constexpr double kNoiseFloor = 1e-12;
    const double prune_below = std::isinf(opt.prune_threshold) ? 0.0 : 1.0 / opt.prune_threshold;

    // Gram-domain updates: per-iteration cost depends on the active set only
    const Eigen::MatrixXcd gram = dict.adjoint() * dict;
    const Eigen::MatrixXcd proj = dict.adjoint() * Yn;

    std::vector<double> gamma(std::size_t(M), 1.0);
    std::vector<char> active(std::size_t(M), 1);
    double noise = 0.1;
    Eigen::MatrixXcd mu;
    std::vector<Eigen::Index> act;
    res.converged = false;

    for (int it = 0; it < opt.max_iter; ++it) {
        act.clear();
        for (Eigen::Index i = 0; i < M; ++i)
            if (active[std::size_t(i)])
                act.push_back(i);
        if (act.empty())
            break;

        const auto n_act = Eigen::Index(act.size());
        Eigen::MatrixXcd G(n_act, n_act);
        Eigen::MatrixXcd B(n_act, K);
        for (Eigen::Index a = 0; a < n_act; ++a) {
            B.row(a) = proj.row(act[std::size_t(a)]);
            for (Eigen::Index b = 0; b < n_act; ++b)
                G(a, b) = gram(act[std::size_t(a)], act[std::size_t(b)]);
        }
        Eigen::MatrixXcd precision = G / noise;
        for (Eigen::Index j = 0; j < n_act; ++j)
            precision(j, j) += 1.0 / gamma[std::size_t(act[std::size_t(j)])];
        const Eigen::LLT<Eigen::MatrixXcd> llt(precision);
        const Eigen::MatrixXcd Sigma = llt.solve(Eigen::MatrixXcd::Identity(n_act, n_act));
        mu = Sigma * B / noise;
        // |Y - A mu|^2 expanded through the Gram matrix
        const double cross = (mu.adjoint() * B).trace().real();
        const double quad = (mu.adjoint() * G * mu).trace().real();
        const double r2 = std::max(y2 - 2.0 * cross + quad, 0.0);
        res.trace.push_back(r2 / y2);
        ++res.iterations;

        double effective = 0.0, change = 0.0, gmax = 0.0;
        std::vector<double> next(act.size());
        for (std::size_t j = 0; j < act.size(); ++j) {
            const double g = gamma[std::size_t(act[j])];
            const double s = Sigma(Eigen::Index(j), Eigen::Index(j)).real();
            const double m2 = mu.row(Eigen::Index(j)).squaredNorm() / double(K);
            const double well_determined = 1.0 - s / g;
            if (opt.update == SblUpdate::mackay && well_determined > 1e-12)
                next[j] = m2 / well_determined;
            else
                next[j] = m2 + s;
            effective += well_determined;
            change = std::max(change, std::abs(next[j] - g));
            gmax = std::max(gmax, g);
        }
        const double denom = double(N) - effective;
        noise = denom > 0.05 * double(N) ? (r2 / double(K)) / denom : (r2 / double(K) + noise * effective) / double(N);
        noise = std::max(noise, kNoiseFloor);

        for (std::size_t j = 0; j < act.size(); ++j) {
            const auto i = std::size_t(act[j]);
            if (next[j] < prune_below) {
                active[i] = 0;
                gamma[i] = 0.0;
            } else {
                gamma[i] = std::max(next[j], kGammaFloor);
            }
        }
        if (change <= opt.tol * gmax) {
            res.converged = true;
            break;
        }
    }

    // order surviving columns by posterior energy, lowest index first on ties
    std::vector<std::size_t> order(act.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return mu.row(Eigen::Index(a)).squaredNorm() > mu.row(Eigen::Index(b)).squaredNorm();
    });
    res.coefficients.resize(Eigen::Index(order.size()), K);
    for (std::size_t j = 0; j < order.size(); ++j) {
        res.support.push_back(act[order[j]]);
        res.coefficients.row(Eigen::Index(j)) = scale * mu.row(Eigen::Index(order[j]));
    }
    const Eigen::MatrixXcd R = act.empty() ? Yn : Eigen::MatrixXcd(Yn - gather(dict, act) * mu);
    res.residual_norm = scale * R.norm();
    return res;
}

RecoveryResult sbl_vbi(const Eigen::MatrixXcd& Y, const Dictionary& dict, const SblOptions& opt) {
    return sbl_vbi(Y, dict.columns(), opt);
}

namespace {

RecoveryResult run_solver(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& dict, const SolverConfig& cfg) {
    if (cfg.solver == Solver::omp)
        return omp(Y, dict, cfg.stop);

    RecoveryResult res = sbl_vbi(Y, dict, cfg.sbl);
    if (cfg.stop.mode != StoppingRule::Mode::residual_threshold) {
        if (cfg.stop.sparsity > dict.cols())
            throw DimensionError("stopping rule asks for more atoms than dictionary columns");
        const auto keep = std::min<std::size_t>(res.support.size(), std::size_t(cfg.stop.sparsity));
        res.support.resize(keep);
        res.coefficients.conservativeResize(Eigen::Index(keep), Eigen::NoChange);
    }
    return res;
}

AngleRecovery recover_angle(const Eigen::MatrixXcd& Y, const std::vector<int>& offsets, const Dictionary& dict,
                            const SolverConfig& cfg) {
    if (!dict.grid().is_angular())
        throw DimensionError("angle recovery needs an angular dictionary");
    AngleRecovery out;
    out.result = run_solver(Y, dict.columns(), cfg);

    const auto zero = std::find(offsets.begin(), offsets.end(), 0);
    const double root_n = std::sqrt(double(dict.axis_length()));
    for (std::size_t j = 0; j < out.result.support.size(); ++j) {
        const auto row = out.result.coefficients.row(Eigen::Index(j));
        AngleAtom atom;
        atom.grid_index = std::size_t(out.result.support[j]);
        atom.omega = dict.grid()[atom.grid_index];
        if (zero != offsets.end()) {
            atom.coefficient = row(zero - offsets.begin());
            atom.power = std::abs(atom.coefficient) / root_n;
        } else {
            atom.coefficient = row(0);
            atom.power = std::sqrt(row.squaredNorm() / double(row.size())) / root_n;
        }
        out.atoms.push_back(atom);
    }
    std::stable_sort(out.atoms.begin(), out.atoms.end(), [](const AngleAtom& a, const AngleAtom& b) {
        if (a.power != b.power)
            return a.power > b.power;
        return a.grid_index < b.grid_index;
    });
    return out;
}

std::vector<int> usable_offsets(const std::vector<int>& offsets, int half) {
    std::vector<int> out;
    for (int o : offsets)
        if (std::abs(o) <= half && std::find(out.begin(), out.end(), o) == out.end())
            out.push_back(o);
    if (out.empty())
        throw DimensionError("no measurement offset lies within the array");
    return out;
}

} // namespace

AngleRecovery recover_azimuth(const ChannelMatrix& W_theta, const Dictionary& dict_az, const SolverConfig& cfg,
                              const std::vector<int>& row_offsets) {
    const int half_z = int(W_theta.rows() - 1) / 2;
    const std::vector<int> rows = usable_offsets(row_offsets, half_z);
    Eigen::MatrixXcd Y(W_theta.cols(), Eigen::Index(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k)
        Y.col(Eigen::Index(k)) = W_theta.row(rows[k] + half_z).transpose();
    return recover_angle(Y, rows, dict_az, cfg);
}

AngleRecovery recover_elevation(const ChannelMatrix& W_phi, const Dictionary& dict_el, const SolverConfig& cfg,
                                const std::vector<int>& col_offsets) {
    const int half_y = int(W_phi.cols() - 1) / 2;
    const std::vector<int> cols = usable_offsets(col_offsets, half_y);
    Eigen::MatrixXcd Y(W_phi.rows(), Eigen::Index(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
        Y.col(Eigen::Index(k)) = W_phi.col(cols[k] + half_y);
    return recover_angle(Y, cols, dict_el, cfg);
}

DistanceRecovery recover_distance(const ChannelMatrix& W_r, const std::vector<PairedDirection>& directions,
                                  const ArrayGeometry& geom, const ParameterGrid& r_grid, const SolverConfig& cfg) {
    if (W_r.rows() != geom.n_z() || W_r.cols() != geom.n_y())
        throw DimensionError("W_r shape does not match the array geometry");
    if (r_grid.is_angular())
        throw DimensionError("distance recovery needs a distance grid");

    std::vector<std::size_t> order(directions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return directions[a].power > directions[b].power; });

    DistanceRecovery out;
    out.estimates.resize(directions.size());
    const Eigen::VectorXcd y = vectorize(W_r);
    const std::size_t L = directions.size();

    SolverConfig one = cfg;
    one.stop = StoppingRule::fixed(1);
    auto select = [&](const Eigen::VectorXcd& target, const Dictionary& dict) {
        DistanceEstimate est;
        est.result = run_solver(target, dict.columns(), one);
        if (est.result.support.empty())  // every column pruned; fall back to the matched filter
            est.result = omp(target, dict.columns(), StoppingRule::fixed(1));
        est.grid_index = std::size_t(est.result.support.front());
        est.distance_r = r_grid[est.grid_index];
        return est;
    };

    std::vector<Dictionary> dicts;
    dicts.reserve(L);
    for (const auto& dir : directions) {
        dicts.push_back(distance_dictionary(geom, {dir.omega_y, dir.omega_z}, r_grid));
        out.dictionary_columns += dicts.back().size();
    }

    // Columns in fit order (strongest direction first) and their joint weights.
    Eigen::MatrixXcd selected(y.size(), 0);
    Eigen::VectorXcd w;
    Eigen::VectorXcd residual = y;
    auto refit = [&] {
        w = selected.colPivHouseholderQr().solve(y);
        residual = y - selected * w;
    };
    for (std::size_t idx : order) {
        out.estimates[idx] = select(residual, dicts[idx]);
        selected.conservativeResize(Eigen::NoChange, selected.cols() + 1);
        selected.col(selected.cols() - 1) = dicts[idx].columns().col(Eigen::Index(out.estimates[idx].grid_index));
        refit();
    }

    // Backfitting: re-select each distance against W_r minus the other paths' fitted share.
    constexpr int max_sweeps = 8;
    for (int sweep = 0; sweep < max_sweeps && L > 1; ++sweep) {
        bool changed = false;
        for (std::size_t j = 0; j < L; ++j) {
            const std::size_t idx = order[j];
            const Eigen::VectorXcd target = residual + w(Eigen::Index(j)) * selected.col(Eigen::Index(j));
            DistanceEstimate est = select(target, dicts[idx]);
            out.estimates[idx].result.iterations += est.result.iterations;
            if (est.grid_index == out.estimates[idx].grid_index)
                continue;
            est.result.iterations = out.estimates[idx].result.iterations;
            out.estimates[idx] = std::move(est);
            selected.col(Eigen::Index(j)) = dicts[idx].columns().col(Eigen::Index(out.estimates[idx].grid_index));
            refit();
            changed = true;
        }
        if (!changed)
            break;
    }

    out.coefficients = Eigen::VectorXcd::Zero(Eigen::Index(L));
    for (std::size_t j = 0; j < L; ++j)
        out.coefficients(Eigen::Index(order[j])) = w(Eigen::Index(j));
    out.residual_norm = residual.norm();
    return out;
}

} // namespace dere
