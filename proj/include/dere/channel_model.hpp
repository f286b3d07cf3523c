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

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dere/geometry.hpp"

namespace dere {

class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class SceneError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

using Rng = std::mt19937_64;

/// One propagation path. distance_r may be kFarField.
struct PathParam {
    Direction direction;
    double distance_r = kFarField;
    double power = 1.0;

    Cosines cosines() const { return direction_cosines(direction); }
};

enum class Wavefront { exact, fresnel };

enum class GainModel {
    rayleigh,  // zero-mean circular complex Gaussian with variance sigma^2, redrawn per snapshot
    fixed      // deterministic real gain sqrt(sigma^2) in every snapshot
};

/// Entry (m,n) = exp(-j k (|r u - p(m,n)| - r)), no approximation.
ChannelMatrix steering_exact(const ArrayGeometry& geom, const PathParam& path);

/// Second-order (Fresnel) steering: exp(-j k Delta) with
/// Delta = -p.u + (|p|^2 - (p.u)^2) / (2 r). A far-field distance drops the quadratic term.
ChannelMatrix steering_fresnel(const ArrayGeometry& geom, const PathParam& path);
ChannelMatrix steering_fresnel(const ArrayGeometry& geom, double omega_y, double omega_z, double r);

ChannelMatrix steering(const ArrayGeometry& geom, const PathParam& path, Wavefront model);

enum class PowerProfile { equal, geometric, random };

struct SceneSpec {
    int num_paths = 3;
    double max_angle_rad = 28.0 * std::numbers::pi / 180.0;  // bound on |theta| and |phi|
    double r_min = 5.0;
    double r_max = 100.0;
    PowerProfile profile = PowerProfile::geometric;
    double power_ratio = 0.5;  // successive power ratio for the geometric profile
    bool grid_aligned = true;
    int min_separation_bins = 2;

    // Cosine / distance grids; required when grid_aligned, and used for the
    // separation spacing otherwise.
    std::vector<double> az_grid;
    std::vector<double> el_grid;
    std::vector<double> r_grid;
};

/// Draws a scene. Grid-aligned scenes snap directions and distances to the
/// supplied grids and keep every pair of paths at least min_separation_bins
/// apart in both the azimuth and the elevation grid index. Powers sum to one.
std::vector<PathParam> generate_paths(Rng& rng, const SceneSpec& scene);

/// T noisy observations of one scene. Snapshot t is column t of an N x T
/// matrix holding the vectorized channel in element order (n outer, m inner).
struct SnapshotEnsemble {
    ArrayGeometry geometry;
    std::vector<PathParam> paths;
    Eigen::MatrixXcd observations;  // N x T, noisy
    Eigen::MatrixXcd clean;         // N x T, noiseless channels kept for scoring
    Eigen::MatrixXcd gains;         // T x L
    double snr_db = std::numeric_limits<double>::infinity();
    double noise_variance = 0.0;  // per complex entry
    std::uint64_t seed = 0;
    Wavefront wavefront = Wavefront::fresnel;
    GainModel gain_model = GainModel::rayleigh;

    int snapshot_count() const { return static_cast<int>(observations.cols()); }
    ChannelMatrix snapshot(int t) const { return unvectorize(observations.col(t)); }
    ChannelMatrix clean_snapshot(int t) const { return unvectorize(clean.col(t)); }

  private:
    ChannelMatrix unvectorize(const Eigen::VectorXcd& v) const {
        return Eigen::Map<const ChannelMatrix>(v.data(), geometry.n_z(), geometry.n_y());
    }
};

/// Steering matrices of the paths, vectorized into the columns of an N x L matrix.
Eigen::MatrixXcd steering_columns(const ArrayGeometry& geom, const std::vector<PathParam>& paths, Wavefront model);

/// Bit-reproducible given (seed, geom, paths, T, snr_db, model). SNR is the
/// ratio of the average per-entry clean power (over elements and snapshots)
/// to the per-entry noise variance; an infinite snr_db adds no noise.
SnapshotEnsemble generate_snapshots(const ArrayGeometry& geom, const std::vector<PathParam>& paths, int T,
                                    double snr_db, Wavefront wavefront, std::uint64_t seed,
                                    GainModel gain_model = GainModel::rayleigh);

} // namespace dere
