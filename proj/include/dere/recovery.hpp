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

#include <vector>

#include "dere/dictionaries.hpp"

namespace dere {

class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct StoppingRule {
    enum class Mode { fixed_sparsity, residual_threshold, combined };

    Mode mode = Mode::fixed_sparsity;
    int sparsity = 1;         // atoms to select (fixed_sparsity, combined)
    double epsilon = 0.0;     // stop once |R|_F <= epsilon * |Y|_F (residual_threshold, combined)
    int max_iterations = 64;  // hard cap for residual_threshold

    static StoppingRule fixed(int L) { return {Mode::fixed_sparsity, L, 0.0, L}; }
    static StoppingRule residual(double eps, int max_iter) { return {Mode::residual_threshold, 1, eps, max_iter}; }
    static StoppingRule combined(int L, double eps) { return {Mode::combined, L, eps, L}; }
};

struct RecoveryResult {
    std::vector<Eigen::Index> support;  // distinct column indices, selection (OMP) or energy (SBL) order
    Eigen::MatrixXcd coefficients;      // support.size() x K
    double residual_norm = 0.0;         // |Y - Phi_S X|_F
    int iterations = 0;
    std::vector<double> trace;  // OMP: residual norm per step; SBL: reconstruction NMSE per iteration
    bool converged = true;
};

/// Simultaneous orthogonal matching pursuit over the columns of a dictionary.
///
/// Each step picks the column with the largest summed |correlation| across
/// measurement vectors (lowest index on ties), then re-solves least squares
/// on the whole support.
RecoveryResult omp(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& dict, const StoppingRule& stop);
RecoveryResult omp(const Eigen::MatrixXcd& Y, const Dictionary& dict, const StoppingRule& stop);

enum class SblUpdate {
    em,     // gamma <- |mu|^2 + Sigma_ii
    mackay  // gamma <- |mu|^2 / (1 - Sigma_ii / gamma), EM where the denominator vanishes
};

struct SblOptions {
    int max_iter = 100;
    SblUpdate update = SblUpdate::mackay;
    double prune_threshold = 1e8;  // precision above which a column is pruned (on unit-power scale)
    double tol = 1e-4;             // relative hyperparameter change for convergence
};

/// Sparse Bayesian learning (multiple-measurement EM form).
///
/// Every column carries a variance hyperparameter gamma_i (precision
/// 1/gamma_i); the noise variance is re-estimated each iteration. Measurements
/// are rescaled to unit average power internally, so prune_threshold is
/// scale free. Non-convergence within max_iter sets converged = false.
RecoveryResult sbl_vbi(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& dict, const SblOptions& opt);
RecoveryResult sbl_vbi(const Eigen::MatrixXcd& Y, const Dictionary& dict, const SblOptions& opt);

enum class Solver { omp, vbi };

struct SolverConfig {
    Solver solver = Solver::omp;
    StoppingRule stop = StoppingRule::fixed(1);
    SblOptions sbl;
};

struct AngleAtom {
    std::size_t grid_index = 0;
    double omega = 0.0;
    double power = 0.0;  // sigma^2-domain estimate
    cd coefficient;      // coefficient on the reference (zero-offset) measurement vector
};

struct AngleRecovery {
    std::vector<AngleAtom> atoms;  // power descending
    RecoveryResult result;
};

/// Rows n of W_theta (n in row_offsets) form the joint measurement vectors.
/// Atom power is |coefficient| / sqrt(axis length) on the n = 0 row, which
/// carries no elevation weighting; without that row the RMS over rows is used.
AngleRecovery recover_azimuth(const ChannelMatrix& W_theta, const Dictionary& dict_az, const SolverConfig& cfg,
                              const std::vector<int>& row_offsets = {0, 1, -1, 2, -2});

// Columns m of W_phi are the measurement vectors.
AngleRecovery recover_elevation(const ChannelMatrix& W_phi, const Dictionary& dict_el, const SolverConfig& cfg,
                                const std::vector<int>& col_offsets = {0, 1, -1, 2, -2});

struct PairedDirection {
    double omega_y = 0.0;
    double omega_z = 0.0;
    double power = 0.0;
    std::size_t az_index = 0;
    std::size_t el_index = 0;
};

struct DistanceEstimate {
    std::size_t grid_index = 0;
    double distance_r = kFarField;
    RecoveryResult result;  // per-direction solver run against the running residual
};

struct DistanceRecovery {
    std::vector<DistanceEstimate> estimates;  // same order as the input directions
    Eigen::VectorXcd coefficients;            // joint least-squares weights, input order
    double residual_norm = 0.0;
    std::size_t dictionary_columns = 0;
};

/// Sequential distance search along already-paired directions, strongest
/// direction first: select one column per direction against the residual of
/// vec(W_r), refit all selected columns jointly, subtract, continue. Each
/// distance is then re-selected against vec(W_r) minus the other paths'
/// fitted share until a full pass changes nothing (at most 8 passes).
DistanceRecovery recover_distance(const ChannelMatrix& W_r, const std::vector<PairedDirection>& directions,
                                  const ArrayGeometry& geom, const ParameterGrid& r_grid, const SolverConfig& cfg);

} // namespace dere
