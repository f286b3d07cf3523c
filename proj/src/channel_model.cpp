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

#include "dere/channel_model.hpp"

#include <algorithm>
#include <string>

namespace dere {

namespace {

void check_distance(double r) {
    if (!(r > 0.0) || std::isnan(r))
        throw DomainError("path distance must be positive, got " + std::to_string(r));
}

cd unit_phasor(double phase) { return {std::cos(phase), std::sin(phase)}; }

} // namespace

ChannelMatrix steering_exact(const ArrayGeometry& geom, const PathParam& path) {
    check_distance(path.distance_r);
    const Cosines c = path.cosines();
    if (is_far_field(path.distance_r))
        return steering_fresnel(geom, c.omega_y, c.omega_z, kFarField);

    ChannelMatrix a = geom.zeros();
    const double r = path.distance_r;
    const double k = geom.wavenumber();
    const double d = geom.spacing();
    for (int n = -geom.half_z(); n <= geom.half_z(); ++n) {
        for (int m = -geom.half_y(); m <= geom.half_y(); ++m) {
            const double pu = d * (m * c.omega_y + n * c.omega_z);
            const double pp = d * d * (double(m) * m + double(n) * n);
            // |r u - p| - r without cancellation
            const double num = pp - 2.0 * r * pu;
            const double r_mn = std::sqrt(r * r + num);
            a(geom.row_of(n), geom.col_of(m)) = unit_phasor(-k * num / (r_mn + r));
        }
    }
    return a;
}

ChannelMatrix steering_fresnel(const ArrayGeometry& geom, double omega_y, double omega_z, double r) {
    check_distance(r);
    const double inv_r = is_far_field(r) ? 0.0 : 1.0 / r;
    const double k = geom.wavenumber();
    const double d = geom.spacing();
    ChannelMatrix a = geom.zeros();
    for (int n = -geom.half_z(); n <= geom.half_z(); ++n) {
        for (int m = -geom.half_y(); m <= geom.half_y(); ++m) {
            const double pu = d * (m * omega_y + n * omega_z);
            const double pp = d * d * (double(m) * m + double(n) * n);
            const double delta = -pu + 0.5 * (pp - pu * pu) * inv_r;
            a(geom.row_of(n), geom.col_of(m)) = unit_phasor(-k * delta);
        }
    }
    return a;
}

ChannelMatrix steering_fresnel(const ArrayGeometry& geom, const PathParam& path) {
    const Cosines c = path.cosines();
    return steering_fresnel(geom, c.omega_y, c.omega_z, path.distance_r);
}

ChannelMatrix steering(const ArrayGeometry& geom, const PathParam& path, Wavefront model) {
    return model == Wavefront::exact ? steering_exact(geom, path) : steering_fresnel(geom, path);
}

namespace {

std::vector<double> draw_powers(Rng& rng, const SceneSpec& scene) {
    std::vector<double> p(static_cast<std::size_t>(scene.num_paths));
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (std::size_t l = 0; l < p.size(); ++l) {
        switch (scene.profile) {
        case PowerProfile::equal:
            p[l] = 1.0;
            break;
        case PowerProfile::geometric:
            p[l] = std::pow(scene.power_ratio, static_cast<double>(l));
            break;
        case PowerProfile::random:
            p[l] = u(rng);
            break;
        }
    }
    double total = 0.0;
    for (double v : p)
        total += v;
    for (double& v : p)
        v /= total;
    return p;
}

double grid_spacing(const std::vector<double>& g) {
    if (g.size() < 2)
        return 0.0;
    return (g.back() - g.front()) / static_cast<double>(g.size() - 1);
}

struct GridCell {
    int iy;
    int iz;
};

std::vector<PathParam> grid_paths(Rng& rng, const SceneSpec& scene) {
    if (scene.az_grid.empty() || scene.el_grid.empty() || scene.r_grid.empty())
        throw SceneError("grid-aligned scenes need azimuth, elevation and distance grids");

    const double s = std::sin(scene.max_angle_rad);
    constexpr double slack = 1e-12;
    std::vector<GridCell> cells;
    for (int iz = 0; iz < int(scene.el_grid.size()); ++iz) {
        const double oz = scene.el_grid[iz];
        if (std::abs(oz) > s + slack)
            continue;
        const double cos_phi = std::sqrt(1.0 - oz * oz);
        for (int iy = 0; iy < int(scene.az_grid.size()); ++iy) {
            const double oy = scene.az_grid[iy];
            if (std::abs(oy) > cos_phi * s + slack || !cosines_realizable(oy, oz))
                continue;
            cells.push_back({iy, iz});
        }
    }
    std::vector<double> distances;
    for (double r : scene.r_grid)
        if (r >= scene.r_min * (1 - 1e-12) && (r <= scene.r_max * (1 + 1e-12) || is_far_field(r)))
            distances.push_back(r);
    if (distances.empty())
        throw SceneError("no distance grid point lies within the scene range");
    if (cells.empty())
        throw SceneError("no grid direction lies within the scene angle span");

    auto span = [&](auto get) {
        int lo = 1 << 30, hi = -1;
        for (const auto& c : cells) {
            lo = std::min(lo, get(c));
            hi = std::max(hi, get(c));
        }
        return hi - lo;
    };
    const int need = (scene.num_paths - 1) * scene.min_separation_bins;
    if (span([](const GridCell& c) { return c.iy; }) < need || span([](const GridCell& c) { return c.iz; }) < need)
        throw SceneError("cannot place " + std::to_string(scene.num_paths) + " paths " +
                         std::to_string(scene.min_separation_bins) + " bins apart on the supplied grids");

    std::uniform_int_distribution<std::size_t> pick_cell(0, cells.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_r(0, distances.size() - 1);
    constexpr int max_attempts = 10000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<GridCell> chosen;
        for (int tries = 0; tries < 200 && int(chosen.size()) < scene.num_paths; ++tries) {
            const GridCell c = cells[pick_cell(rng)];
            const bool ok = std::all_of(chosen.begin(), chosen.end(), [&](const GridCell& o) {
                return std::abs(o.iy - c.iy) >= scene.min_separation_bins &&
                       std::abs(o.iz - c.iz) >= scene.min_separation_bins;
            });
            if (ok)
                chosen.push_back(c);
        }
        if (int(chosen.size()) < scene.num_paths)
            continue;
        const std::vector<double> powers = draw_powers(rng, scene);
        std::vector<PathParam> out;
        for (std::size_t l = 0; l < chosen.size(); ++l) {
            const double oy = scene.az_grid[chosen[l].iy];
            const double oz = scene.el_grid[chosen[l].iz];
            out.push_back({direction_from_cosines(oy, oz), distances[pick_r(rng)], powers[l]});
        }
        return out;
    }
    throw SceneError("failed to place " + std::to_string(scene.num_paths) + " separated paths");
}

std::vector<PathParam> continuous_paths(Rng& rng, const SceneSpec& scene) {
    const double sep_y = scene.min_separation_bins * grid_spacing(scene.az_grid);
    const double sep_z = scene.min_separation_bins * grid_spacing(scene.el_grid);
    const double s = std::sin(scene.max_angle_rad);
    if ((scene.num_paths - 1) * std::max(sep_y, sep_z) > 2.0 * s)
        throw SceneError("requested separation is infeasible for the scene angle span");

    std::uniform_real_distribution<double> angle(-scene.max_angle_rad, scene.max_angle_rad);
    std::uniform_real_distribution<double> dist(scene.r_min, scene.r_max);
    constexpr int max_attempts = 100000;
    std::vector<PathParam> out;
    std::vector<Cosines> cos;
    for (int attempt = 0; attempt < max_attempts && int(out.size()) < scene.num_paths; ++attempt) {
        const Direction dir(angle(rng), angle(rng));
        const Cosines c = direction_cosines(dir);
        const bool ok = std::all_of(cos.begin(), cos.end(), [&](const Cosines& o) {
            return std::abs(o.omega_y - c.omega_y) >= sep_y && std::abs(o.omega_z - c.omega_z) >= sep_z;
        });
        if (!ok)
            continue;
        cos.push_back(c);
        out.push_back({dir, dist(rng), 0.0});
    }
    if (int(out.size()) < scene.num_paths)
        throw SceneError("failed to place separated off-grid paths");
    const std::vector<double> powers = draw_powers(rng, scene);
    for (std::size_t l = 0; l < out.size(); ++l)
        out[l].power = powers[l];
    return out;
}

} // namespace

std::vector<PathParam> generate_paths(Rng& rng, const SceneSpec& scene) {
    if (scene.num_paths < 1)
        throw SceneError("a scene needs at least one path");
    if (!(scene.r_min > 0.0) || !(scene.r_max >= scene.r_min))
        throw SceneError("scene distance range must satisfy 0 < r_min <= r_max");
    if (!(scene.max_angle_rad > 0.0) || !(scene.max_angle_rad < std::numbers::pi / 2))
        throw SceneError("scene angle span must lie in (0, pi/2)");
    if (scene.min_separation_bins < 0)
        throw SceneError("minimum separation must be non-negative");
    return scene.grid_aligned ? grid_paths(rng, scene) : continuous_paths(rng, scene);
}

Eigen::MatrixXcd steering_columns(const ArrayGeometry& geom, const std::vector<PathParam>& paths, Wavefront model) {
    Eigen::MatrixXcd A(geom.element_count(), Eigen::Index(paths.size()));
    for (std::size_t l = 0; l < paths.size(); ++l) {
        const ChannelMatrix a = steering(geom, paths[l], model);
        A.col(Eigen::Index(l)) = Eigen::Map<const Eigen::VectorXcd>(a.data(), a.size());
    }
    return A;
}

SnapshotEnsemble generate_snapshots(const ArrayGeometry& geom, const std::vector<PathParam>& paths, int T,
                                    double snr_db, Wavefront wavefront, std::uint64_t seed, GainModel gain_model) {
    if (T < 1)
        throw DomainError("snapshot count must be at least 1");
    if (std::isnan(snr_db))
        throw DomainError("SNR must not be NaN");
    for (const auto& p : paths)
        if (!(p.power > 0.0))
            throw DomainError("path power must be positive");

    const auto L = Eigen::Index(paths.size());
    SnapshotEnsemble ens{geom, paths, {}, {}, Eigen::MatrixXcd::Zero(T, L), snr_db, 0.0, seed, wavefront, gain_model};

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < T; ++t) {
        for (Eigen::Index l = 0; l < L; ++l) {
            const double power = paths[std::size_t(l)].power;
            if (gain_model == GainModel::fixed) {
                ens.gains(t, l) = std::sqrt(power);
            } else {
                const double s = std::sqrt(power / 2.0);
                const double re = normal(rng);
                const double im = normal(rng);
                ens.gains(t, l) = cd(s * re, s * im);
            }
        }
    }
    ens.clean = steering_columns(geom, paths, wavefront) * ens.gains.transpose();
    if (L == 0)
        ens.clean = Eigen::MatrixXcd::Zero(geom.element_count(), T);

    if (std::isinf(snr_db) && snr_db > 0) {
        ens.observations = ens.clean;
        return ens;
    }
    const double clean_power = ens.clean.squaredNorm() / double(ens.clean.size());
    ens.noise_variance = clean_power / std::pow(10.0, snr_db / 10.0);
    const double s = std::sqrt(ens.noise_variance / 2.0);
    ens.observations = ens.clean;
    for (Eigen::Index t = 0; t < ens.observations.cols(); ++t) {
        for (Eigen::Index i = 0; i < ens.observations.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            ens.observations(i, t) += cd(s * re, s * im);
        }
    }
    return ens;
}

} // namespace dere
