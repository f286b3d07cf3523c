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

#include <optional>
#include <vector>

#include "dere/channel_model.hpp"

namespace dere {

// Second-order statistics of a snapshot ensemble. All four matrices share the
// channel layout (n_z x n_y, centre element at (half_z, half_y)).
struct SparseFunctionSet {
    ChannelMatrix C;        // point-symmetric pair statistic, angle only
    ChannelMatrix W_theta;  // phase across m carries azimuth cosines only
    ChannelMatrix W_phi;    // phase across n carries elevation cosines only
    ChannelMatrix W_r;      // origin-referenced statistic, angle and distance
    int snapshot_count = 0;
};

struct DecompositionOptions {
    // Subtract the ensemble's recorded noise variance from the (0,0) self-terms.
    bool debias_center = false;
};

/// C[m,n] = (1/T) sum_t h_t(m,n) conj(h_t(-m,-n)).
///
/// Under the Fresnel model the distance-bearing quadratic phase is even in
/// (m,n) and cancels, leaving sum_l sigma_l^2 exp(j 2kd (m Omega_y + n Omega_z)).
ChannelMatrix covariance_symmetric(const SnapshotEnsemble& ens, const DecompositionOptions& opt = {});

// (C[m,n] + C[m,-n]) / 2
ChannelMatrix sparse_function_azimuth(const ChannelMatrix& C);

// (C[m,n] + C[-m,n]) / 2
ChannelMatrix sparse_function_elevation(const ChannelMatrix& C);

/// W_r[m,n] = (1/T) sum_t h_t(m,n) conj(h_t(0,0)).
ChannelMatrix covariance_origin(const SnapshotEnsemble& ens, const DecompositionOptions& opt = {});

SparseFunctionSet decompose(const SnapshotEnsemble& ens, const DecompositionOptions& opt = {});

/// Population (T -> infinity, noiseless, Fresnel) values of C and W_r for a path set.
ChannelMatrix population_covariance_symmetric(const ArrayGeometry& geom, const std::vector<PathParam>& paths);
ChannelMatrix population_covariance_origin(const ArrayGeometry& geom, const std::vector<PathParam>& paths);

struct SpectrumRequest {
    std::vector<double> az_cosines;
    std::vector<double> el_cosines;
    std::vector<double> distances;
    double fixed_r = kFarField;          // distance assumed by the angular matched filter
    std::optional<Cosines> direction;    // distance spectrum direction; angular argmax if unset
};

struct PowerSpectra {
    Eigen::MatrixXd angular;  // el x az, |c^H vec(W_r)| with unit-norm Fresnel columns at fixed_r
    Eigen::Index az_peak = 0;
    Eigen::Index el_peak = 0;
    Cosines distance_direction;
    std::vector<double> distance;  // one value per requested distance
    Eigen::Index r_peak = 0;
};

/// Matched-filter power maps of the origin-referenced statistic, for inspection
/// of angular and distance power spread. Nothing is corrected here.
PowerSpectra power_spectrum_diagnostics(const SnapshotEnsemble& ens, const SpectrumRequest& req);

} // namespace dere
