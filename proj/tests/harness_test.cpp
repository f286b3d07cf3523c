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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dere/harness.hpp"

using namespace dere;

namespace {

ExperimentConfig small(std::string_view extra = "") {
    ExperimentConfig c = load_config(R"(
geometry.n_y = 17
geometry.n_z = 9
scene.max_angle_deg = 25
estimation.snapshots = 40
estimation.r_points = 12
sweep.snr_db = 0, 10
sweep.trials = 3
converge.seeds = 4
converge.max_iter = 5
)");
    apply_config(c, extra);
    validate(c);
    return c;
}

std::string csv_of(const std::vector<MetricRecord>& r) {
    std::ostringstream s;
    write_csv(s, r);
    return s.str();
}

} // namespace

TEST_CASE("child seeds depend on every key") {
    CHECK(child_seed(7, 0, 0) == child_seed(7, 0, 0));
    CHECK(child_seed(7, 0, 1) != child_seed(7, 0, 0));
    CHECK(child_seed(7, 1, 0) != child_seed(7, 0, 0));
    CHECK(child_seed(8, 0, 0) != child_seed(7, 0, 0));
    CHECK(child_seed(7, 1, 0) != child_seed(7, 0, 1));
}

TEST_CASE("one SNR point and one trial give one record per solver") {
    const auto res = run_sweep(small("sweep.snr_db = 5\nsweep.trials = 1\nestimation.solver = omp"));
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].solver == "omp");
    CHECK(res.records[0].snr_db == 5.0);
    CHECK(res.records[0].runtime_ms == 0.0);
    CHECK(res.summary.records == 1);
    CHECK(res.summary.dere_columns == 17 + 9 + 3 * 12);
    CHECK(res.summary.oracle_columns == 17 * 9 * 12);
}

TEST_CASE("records cover the sweep in order") {
    const auto res = run_sweep(small());
    CHECK(res.records.size() == 2 * 3 * 2);
    for (std::size_t i = 1; i < res.records.size(); ++i) {
        const auto& a = res.records[i - 1];
        const auto& b = res.records[i];
        CHECK(std::tie(a.snr_db, a.trial, a.solver) < std::tie(b.snr_db, b.trial, b.solver));
    }
    for (const auto& r : res.records)
        CHECK((r.failed() || std::isfinite(r.nmse_db)));
}

TEST_CASE("infinite SNR on-grid sweep is exact") {
    const auto res = run_sweep(small("sweep.snr_db = inf\nestimation.solver = omp\nestimation.snapshots = 400"));
    for (const auto& r : res.records) {
        CHECK(r.az_exact);
        CHECK(r.el_exact);
        CHECK(r.r_exact);
    }
}

TEST_CASE("sweeps are reproducible across runs and thread counts") {
    const ExperimentConfig c = small();
    const std::string one = csv_of(run_sweep(c, {1, false}).records);
    CHECK(csv_of(run_sweep(c, {1, false}).records) == one);
    CHECK(csv_of(run_sweep(c, {3, false}).records) == one);
    CHECK(csv_of(run_sweep(c, {0, false}).records) == one);
    ExperimentConfig other = c;
    other.seed = 2;
    CHECK(csv_of(run_sweep(other).records) != one);
}

TEST_CASE("csv layout") {
    MetricRecord r;
    r.trial = 3;
    r.snr_db = 12.5;
    r.solver = "vbi";
    r.nmse_db = -31.234567891;
    r.az_exact = true;
    r.iterations = 17;
    r.seed = 18446744073709551615ull;
    const std::string csv = csv_of({r});
    CHECK(csv == std::string(kCsvHeader) + "\n3,12.5,vbi,-31.2346,true,false,false,17,0,18446744073709551615\n");
    MetricRecord f = r;
    f.nmse_db = std::numeric_limits<double>::quiet_NaN();
    CHECK(csv_of({f}).find(",nan,") != std::string::npos);
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(1234567.0) == "1.23457e+06");
}

TEST_CASE("json round trip") {
    auto records = run_sweep(small("sweep.trials = 2")).records;
    records[1].nmse_db = std::numeric_limits<double>::quiet_NaN();
    records[2].snr_db = std::numeric_limits<double>::infinity();
    std::stringstream s;
    write_json(s, records);
    const auto back = read_json(s);
    CHECK(back == records);
}

TEST_CASE("emit") {
    const auto dir = std::filesystem::temp_directory_path() / "dere_emit_test";
    std::filesystem::create_directories(dir);
    MetricRecord r;
    r.solver = "omp";
    const auto csv = (dir / "one.csv").string();
    emit({r}, "csv", csv);
    std::ifstream in(csv);
    std::string line;
    int lines = 0;
    while (std::getline(in, line))
        ++lines;
    CHECK(lines == 2);
    emit({r}, "json", (dir / "one.json").string());
    std::ifstream js((dir / "one.json").string());
    CHECK(read_json(js) == std::vector<MetricRecord>{r});
    CHECK_THROWS_AS(emit({}, "csv", csv), std::invalid_argument);
    CHECK_THROWS_AS(emit({r}, "xml", csv), std::invalid_argument);
    CHECK_THROWS_AS(emit({r}, "csv", (dir / "missing" / "x.csv").string()), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("trial failures are recorded, not thrown") {
    // Residual stopping with a zero threshold and two atoms at most leaves a 3-path scene short.
    const auto res = run_sweep(small("estimation.stop = residual\nestimation.residual_epsilon = 0\nestimation.max_atoms = 2"));
    CHECK(res.records.size() == 12);
    CHECK(res.summary.failures == res.records.size() - std::size_t(std::count_if(res.records.begin(), res.records.end(),
                                                                                     [](const auto& r) { return !r.failed(); })));
    CHECK(res.summary.failure_rate == double(res.summary.failures) / 12.0);
}

TEST_CASE("convergence traces") {
    const auto c = small();
    const auto res = run_convergence(c);
    CHECK(res.records.size() == 4 * 5 * 4);
    CHECK(res.median.size() == 5 * 4);
    for (const auto& m : res.median) {
        CHECK(m.trial == -1);
        CHECK((m.iteration >= 1 && m.iteration <= 5));
    }
    std::ostringstream a, b;
    write_convergence_csv(a, res.records);
    write_convergence_csv(b, run_convergence(c, {2, false}).records);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("trial,iteration,parameter,nmse_db,seed\n", 0) == 0);

    const auto clean = run_convergence(small("converge.snr_db = inf\nconverge.max_iter = 12"));
    for (const auto& m : clean.median)
        if (m.iteration == 12 && m.parameter != "r")
            CHECK(m.nmse_db < -100);
}

TEST_CASE("spectra report") {
    const auto rep = run_spectra(small("spectra.distance_r = 1"), 3);
    CHECK(rep.spectra.angular.rows() == 9);
    CHECK(rep.spectra.angular.cols() == 17);
    CHECK(rep.spectra.distance.size() == rep.r_grid.count());
    CHECK(rep.paths.size() == 1);
    std::ostringstream s;
    write_spectra_csv(s, rep);
    CHECK(!s.str().empty());
}
