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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dere/reconstruction.hpp"

namespace dere {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class SolverChoice { omp, vbi, both };

struct GeometryBlock {
    int n_y = 33;
    int n_z = 17;
    double d_over_lambda = 0.5;
    double carrier_hz = 30e9;
};

struct SceneBlock {
    int paths = 3;
    double max_angle_deg = 28.0;
    double r_min = 5.0;
    double r_max = 100.0;
    PowerProfile power_profile = PowerProfile::geometric;
    double power_ratio = 0.5;
    bool on_grid = true;
    int min_separation_bins = 2;
    Wavefront wavefront = Wavefront::fresnel;
    GainModel gain_model = GainModel::rayleigh;
};

struct EstimationBlock {
    SolverChoice solver = SolverChoice::both;
    int snapshots = 200;
    int az_points = 0;  // 0: one per column of the array
    int el_points = 0;  // 0: one per row of the array
    std::optional<double> az_omega_max;  // unset: DFT grid
    std::optional<double> el_omega_max;
    int r_points = 32;
    bool r_far_field = false;
    StoppingRule::Mode stop = StoppingRule::Mode::fixed_sparsity;
    double residual_epsilon = 1e-3;
    int max_atoms = 16;
    std::vector<int> az_rows = {0, 1, -1, 2, -2};
    std::vector<int> el_cols = {0, 1, -1, 2, -2};
    PairingRule pairing = PairingRule::greedy;
    int sbl_max_iter = 100;
    double sbl_prune = 1e8;
    double sbl_tol = 1e-4;
    SblUpdate sbl_update = SblUpdate::mackay;
    bool debias_center = false;
};

struct SweepBlock {
    std::vector<double> snr_db = {0, 5, 10, 15, 20};
    int trials = 100;
    double max_failure_rate = 0.05;
    int threads = 1;
};

struct ConvergeBlock {
    double snr_db = 10.0;
    int seeds = 50;
    int max_iter = 30;
};

struct SpectraBlock {
    int paths = 1;
    double distance_r = 5.0;
    double snr_db = std::numeric_limits<double>::infinity();
};

// Small exhaustive instance compared against the joint oracle.
struct OracleBlock {
    int n = 9;
    int angle_points = 8;
    int r_points = 6;
    double r_min = 0.02;
    double r_max = 0.64;
    int snapshots = 1000;
    int stride = 1;  // keep every stride-th placement
};

struct ExperimentConfig {
    GeometryBlock geometry;
    SceneBlock scene;
    EstimationBlock estimation;
    SweepBlock sweep;
    ConvergeBlock converge;
    SpectraBlock spectra;
    OracleBlock oracle;
    std::uint64_t seed = 1;
    std::vector<std::string> warnings;

    ArrayGeometry array() const;
    PipelineConfig pipeline(Solver solver) const;
    SceneSpec scene_spec(const PipelineConfig& pipeline) const;
    std::vector<Solver> solvers() const;
};

/// Parses `section.key = value` lines; `[section]` headers prefix later keys
/// and `#` starts a comment. Empty input yields the defaults. Throws
/// ConfigError naming the line or field on parse and validation failures.
ExperimentConfig load_config(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);

/// Applies text on top of an existing config.
void apply_config(ExperimentConfig& cfg, std::string_view text);

/// Fail-fast checks of every module precondition the config reaches.
void validate(ExperimentConfig& cfg);

/// Shipped presets: "desk" (33 x 17) and "paper" (129 x 65).
std::string preset_text(std::string_view name);
ExperimentConfig preset_config(std::string_view name);

/// Every key with its current value, parseable by load_config.
std::string dump_config(const ExperimentConfig& cfg);

std::string to_string(SolverChoice s);
std::string to_string(Solver s);

} // namespace dere
