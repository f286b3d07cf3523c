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
#include <iosfwd>
#include <string>
#include <vector>

#include "dere/config.hpp"

namespace dere {

/// Seed of one trial, independent of execution order.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t snr_index, std::uint64_t trial);

struct MetricRecord {
    int trial = 0;
    double snr_db = 0.0;
    std::string solver;
    double nmse_db = 0.0;  // NaN marks a failed trial
    bool az_exact = false;
    bool el_exact = false;
    bool r_exact = false;
    int iterations = 0;
    double runtime_ms = 0.0;
    std::uint64_t seed = 0;

    bool failed() const { return std::isnan(nmse_db); }
    bool operator==(const MetricRecord&) const;
};

inline constexpr const char* kCsvHeader =
    "trial,snr_db,solver,nmse_db,az_exact,el_exact,r_exact,iterations,runtime_ms,seed";

struct RunOptions {
    int threads = -1;     // -1: use the config value, 0: hardware concurrency
    bool timing = false;  // record wall time in runtime_ms (otherwise 0, keeping output reproducible)
};

struct SweepSummary {
    std::size_t records = 0;
    std::size_t failures = 0;
    double failure_rate = 0.0;
    double wall_ms = 0.0;
    std::size_t dere_columns = 0;    // N_az + N_el + L N_r
    std::size_t oracle_columns = 0;  // N_az N_el N_r
    std::vector<std::string> failure_messages;
};

struct SweepResult {
    std::vector<MetricRecord> records;  // ordered by (snr_db, trial, solver)
    SweepSummary summary;
};

/// Exactness of an estimate against on-grid truth, in nearest-grid-index terms.
struct SupportMatch {
    bool az = false;
    bool el = false;
    bool r = false;
    bool all() const { return az && el && r; }
};

SupportMatch support_match(const std::vector<PathParam>& truth, const std::vector<PathEstimate>& estimate,
                           const PipelineConfig& cfg);

/// One scene and ensemble as drawn for (seed) by every harness operation.
SnapshotEnsemble draw_trial(const ExperimentConfig& cfg, const PipelineConfig& pipeline, std::uint64_t seed,
                            double snr_db);

SweepResult run_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct ConvergenceRecord {
    int trial = 0;
    int iteration = 0;
    std::string parameter;  // omega_y, omega_z, r or channel
    double nmse_db = 0.0;
    std::uint64_t seed = 0;
};

struct ConvergenceResult {
    std::vector<ConvergenceRecord> records;
    std::vector<ConvergenceRecord> median;  // trial = -1, seed = 0
    std::size_t failures = 0;
};

inline constexpr double kNmseFloorDb = -300.0;

/// Iteration k reruns the VBI pipeline with the iteration budget capped at k
/// (k = 1..max_iter) on scenes drawn at converge.snr_db.
ConvergenceResult run_convergence(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct SpectraReport {
    std::vector<PathParam> paths;
    PowerSpectra spectra;
    ParameterGrid az_grid, el_grid, r_grid;
    std::size_t true_az = 0, true_el = 0, true_r = 0;  // grid bins of the strongest path
    bool angle_peak_off = false;
    bool distance_peak_off = false;
    SupportMatch dere;
    double dere_nmse_db = 0.0;
};

/// Planar-wavefront angular spectrum of W_r followed by the distance spectrum
/// along its peak, for a seeded near-field scene at spectra.distance_r; the
/// DeRe estimate of the same ensemble is scored alongside.
SpectraReport run_spectra(const ExperimentConfig& cfg, std::uint64_t seed);

struct OracleReport {
    std::size_t instances = 0;
    std::size_t dere_exact = 0;
    std::size_t oracle_exact = 0;
    std::size_t agree = 0;
    double worst_nmse_db = -std::numeric_limits<double>::infinity();
    std::size_t dere_columns = 0;
    std::size_t oracle_columns = 0;
    double dere_ms = 0.0;
    double oracle_ms = 0.0;
    std::vector<std::string> counterexamples;
};

/// Every well-separated on-grid L-path placement of the oracle block's small
/// array, noiseless; distance triples and power orders cycle across placements.
OracleReport run_oracle_suite(const ExperimentConfig& cfg, const RunOptions& opt = {});

void write_csv(std::ostream& out, const std::vector<MetricRecord>& records);
void write_json(std::ostream& out, const std::vector<MetricRecord>& records);
std::vector<MetricRecord> read_json(std::istream& in);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records);
void write_convergence_json(std::ostream& out, const std::vector<ConvergenceRecord>& records);
void write_spectra_csv(std::ostream& out, const SpectraReport& report);
void write_spectra_json(std::ostream& out, const SpectraReport& report);
void write_oracle_json(std::ostream& out, const OracleReport& report);

/// Writes records to path in the given format ("csv" or "json"); throws
/// std::runtime_error for an unwritable path and std::invalid_argument for
/// empty records.
void emit(const std::vector<MetricRecord>& records, const std::string& format, const std::string& path);

/// Six significant digits, "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

} // namespace dere
