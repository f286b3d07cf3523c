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

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dere/channel_model.hpp"
#include "dere/decomposition.hpp"
#include "dere/dictionaries.hpp"
#include "dere/recovery.hpp"

namespace dere {

class RankError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Carries the name of the pipeline stage that failed.
class StageError : public std::runtime_error {
  public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

  private:
    std::string stage_;
};

struct PathEstimate {
    double omega_y = 0.0;
    double omega_z = 0.0;
    double distance_r = kFarField;
    double power = 0.0;
    std::optional<std::vector<cd>> gain_per_snapshot;
};

struct ChannelEstimate {
    std::vector<PathEstimate> paths;
    Eigen::MatrixXcd rebuilt_snapshots;  // N x T, same layout as SnapshotEnsemble::observations
    double nmse_linear = 0.0;
};

enum class PairingRule {
    greedy,  // repeatedly pair the globally closest-in-power remaining atoms
    exact    // minimum total |power difference| over all assignments
};

struct PairingResult {
    std::vector<PairedDirection> pairs;  // ordered like the azimuth atoms
    std::size_t dropped_az = 0;
    std::size_t dropped_el = 0;
};

/// Pairs azimuth and elevation atoms by power similarity. The longer list is
/// first trimmed to the shorter one by dropping its weakest atoms. Paired
/// power is the mean of the two atom powers. Ties resolve to the lower
/// azimuth index, then the lower elevation index (list positions).
PairingResult match_angle_pairs(const std::vector<AngleAtom>& az, const std::vector<AngleAtom>& el,
                                PairingRule rule = PairingRule::greedy);

/// Per-snapshot least squares against the Fresnel steering columns of the
/// estimated paths; returned matrix is T x L. Throws RankError when two
/// estimated paths are (numerically) the same column.
Eigen::MatrixXcd estimate_gains(const SnapshotEnsemble& ens, const std::vector<PathEstimate>& paths);

/// N x T rebuilt channels, one vectorized snapshot per column.
Eigen::MatrixXcd reconstruct_channel(const std::vector<PathEstimate>& paths, const Eigen::MatrixXcd& gains,
                                     const ArrayGeometry& geom);

struct Nmse {
    double linear = 0.0;
    double db = 0.0;
};

// sum_t |H_hat_t - H_t|_F^2 / sum_t |H_t|_F^2
Nmse nmse(const Eigen::MatrixXcd& estimate, const Eigen::MatrixXcd& truth);
Nmse nmse(const std::vector<ChannelMatrix>& estimate, const std::vector<ChannelMatrix>& truth);

struct PipelineConfig {
    PipelineConfig(ParameterGrid az, ParameterGrid el, ParameterGrid r)
        : az_grid(std::move(az)), el_grid(std::move(el)), r_grid(std::move(r)) {}

    ParameterGrid az_grid;
    ParameterGrid el_grid;
    ParameterGrid r_grid;
    int num_paths = 3;
    Solver solver = Solver::omp;
    SblOptions sbl;
    StoppingRule::Mode stop_mode = StoppingRule::Mode::fixed_sparsity;
    double residual_epsilon = 1e-3;
    int max_atoms = 16;  // cap for residual-threshold stopping
    std::vector<int> az_rows = {0, 1, -1, 2, -2};
    std::vector<int> el_cols = {0, 1, -1, 2, -2};
    PairingRule pairing = PairingRule::greedy;
    DecompositionOptions decomposition;
};

/// One angle point per element along each axis and a reciprocal distance
/// grid on [r_min, r_max]. Without omega_max the angle grids are the DFT
/// grids of the doubled-phase dictionaries (see dft_omega_max).
PipelineConfig default_pipeline_config(const ArrayGeometry& geom, int num_paths, double r_min = 5.0,
                                       double r_max = 100.0, int r_count = 32,
                                       std::optional<double> omega_max = std::nullopt);

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct PipelineDiagnostics {
    AngleRecovery azimuth;
    AngleRecovery elevation;
    PairingResult pairing;
    DistanceRecovery distance;
    std::size_t az_columns = 0;
    std::size_t el_columns = 0;
    std::size_t r_columns = 0;  // summed over every per-direction distance dictionary
    int total_iterations = 0;
    std::vector<StageTiming> timings;

    std::size_t dictionary_columns() const { return az_columns + el_columns + r_columns; }
};

struct PipelineOutput {
    ChannelEstimate estimate;
    PipelineDiagnostics diagnostics;
};

/// Decompose, recover each parameter, pair, search distances, fit gains,
/// rebuild and score against the ensemble's clean channels.
PipelineOutput dere_pipeline(const SnapshotEnsemble& ens, const PipelineConfig& cfg);

struct JointDictionary {
    Eigen::MatrixXcd columns;                         // unit-norm vectorized Fresnel steering
    std::vector<std::array<std::size_t, 3>> indices;  // (az, el, r) grid indices per column
    std::vector<double> az, el, r;
};

inline constexpr std::size_t kDefaultOracleCap = 65536;

/// Exhaustive (azimuth, elevation, distance) dictionary; GridError when the
/// product of grid sizes exceeds cap.
JointDictionary build_joint_dictionary(const ArrayGeometry& geom, const ParameterGrid& az, const ParameterGrid& el,
                                       const ParameterGrid& r, std::size_t cap = kDefaultOracleCap);

struct OracleTriple {
    std::size_t az = 0, el = 0, r = 0;
    double omega_y = 0.0, omega_z = 0.0, distance_r = kFarField;
};

/// Orthogonal matching pursuit of L atoms on vec(W_r) over the joint dictionary.
std::vector<OracleTriple> joint_3d_oracle(const ChannelMatrix& W_r, const JointDictionary& dict, int num_paths);
std::vector<OracleTriple> joint_3d_oracle(const SnapshotEnsemble& ens, const ParameterGrid& az, const ParameterGrid& el,
                                          const ParameterGrid& r, int num_paths, std::size_t cap = kDefaultOracleCap);

} // namespace dere
