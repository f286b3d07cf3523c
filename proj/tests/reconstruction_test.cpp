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

#include "dere/harness.hpp"
#include "dere/serialization.hpp"
#include "support.hpp"

using namespace dere;
using dere::test::median;
using dere::test::path_at;
using doctest::Approx;

namespace {

AngleAtom atom(double omega, double power, std::size_t index = 0) {
    AngleAtom a;
    a.omega = omega;
    a.power = power;
    a.grid_index = index;
    return a;
}

std::vector<PathEstimate> as_estimates(const std::vector<PathParam>& paths) {
    std::vector<PathEstimate> out;
    for (const auto& p : paths) {
        const Cosines c = p.cosines();
        out.push_back({c.omega_y, c.omega_z, p.distance_r, p.power, std::nullopt});
    }
    return out;
}

const ArrayGeometry kDesk = ArrayGeometry::half_wavelength(33, 17, 30e9);

} // namespace

TEST_CASE("greedy pairing by power") {
    const auto r = match_angle_pairs({atom(0.3, 2.0), atom(-0.1, 0.5)}, {atom(0.2, 0.49), atom(0.0, 2.05)});
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0].omega_y == 0.3);
    CHECK(r.pairs[0].omega_z == 0.0);
    CHECK(r.pairs[0].power == Approx(2.025));
    CHECK(r.pairs[1].omega_y == -0.1);
    CHECK(r.pairs[1].omega_z == 0.2);

    const auto ex = match_angle_pairs({atom(0.3, 2.0), atom(-0.1, 0.5)}, {atom(0.2, 0.49), atom(0.0, 2.05)},
                                      PairingRule::exact);
    CHECK(ex.pairs[0].omega_z == 0.0);
    CHECK(ex.pairs[1].omega_z == 0.2);

    const auto one = match_angle_pairs({atom(0.1, 1.0)}, {atom(-0.2, 3.0)});
    REQUIRE(one.pairs.size() == 1);
    CHECK(one.pairs[0].omega_y == 0.1);
    CHECK(one.pairs[0].omega_z == -0.2);

    CHECK_THROWS_AS(match_angle_pairs({}, {atom(0.0, 1.0)}), std::invalid_argument);
}

TEST_CASE("equal powers pair in index order") {
    const std::vector<AngleAtom> az = {atom(0.1, 1.0, 3), atom(0.2, 1.0, 5), atom(0.3, 1.0, 9)};
    const std::vector<AngleAtom> el = {atom(-0.1, 1.0, 1), atom(-0.2, 1.0, 2), atom(-0.3, 1.0, 4)};
    const auto a = match_angle_pairs(az, el);
    const auto b = match_angle_pairs(az, el);
    REQUIRE(a.pairs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.pairs[i].omega_y == az[i].omega);
        CHECK(a.pairs[i].omega_z == el[i].omega);
        CHECK(a.pairs[i].omega_z == b.pairs[i].omega_z);
    }
}

TEST_CASE("excess atoms are dropped weakest first") {
    const auto r = match_angle_pairs({atom(0.1, 1.0), atom(0.2, 0.1), atom(0.3, 0.5)}, {atom(0.0, 0.9), atom(0.4, 0.45)});
    CHECK(r.pairs.size() == 2);
    CHECK(r.dropped_az == 1);
    CHECK(r.dropped_el == 0);
    for (const auto& p : r.pairs)
        CHECK(p.omega_y != 0.2);
}

TEST_CASE("gains from true paths") {
    const std::vector<PathParam> paths = {path_at(0.2, 0.1, 6.0, 0.5), path_at(-0.3, -0.2, 15.0, 0.3),
                                          path_at(0.05, 0.35, 40.0, 0.2)};
    const auto ens = generate_snapshots(kDesk, paths, 25, kFarField, Wavefront::fresnel, 4);
    const auto est = as_estimates(paths);
    const Eigen::MatrixXcd G = estimate_gains(ens, est);
    CHECK(G.rows() == 25);
    CHECK(G.cols() == 3);
    CHECK((G - ens.gains).cwiseAbs().maxCoeff() < 1e-9);

    const Eigen::MatrixXcd H = reconstruct_channel(est, G, kDesk);
    CHECK(nmse(H, ens.clean).linear <= 1e-18);

    auto dup = est;
    dup.push_back(est[1]);
    CHECK_THROWS_AS(estimate_gains(ens, dup), RankError);
}

TEST_CASE("least-squares gain noise floor at 20 dB on the full array") {
    const ArrayGeometry g = ArrayGeometry::half_wavelength(129, 65, 30e9);
    const std::vector<PathParam> paths = {path_at(0.2, 0.1, 6.0, 4.0 / 7), path_at(-0.3, -0.2, 15.0, 2.0 / 7),
                                          path_at(0.05, 0.35, 40.0, 1.0 / 7)};
    const auto est = as_estimates(paths);
    std::vector<double> errs;
    for (int seed = 0; seed < 100; ++seed) {
        const auto ens = generate_snapshots(g, paths, 2, 20.0, Wavefront::fresnel, std::uint64_t(seed));
        const Eigen::MatrixXcd G = estimate_gains(ens, est);
        for (Eigen::Index i = 0; i < G.size(); ++i)
            errs.push_back(std::abs(G.data()[i] - ens.gains.data()[i]) / std::abs(ens.gains.data()[i]));
    }
    CHECK(median(errs) < 0.05);
}

TEST_CASE("channel reconstruction") {
    CHECK(reconstruct_channel({}, Eigen::MatrixXcd(3, 0), kDesk).isZero());
    CHECK(reconstruct_channel({}, Eigen::MatrixXcd(3, 0), kDesk).rows() == kDesk.element_count());
    const auto p = path_at(0.2, 0.1, 6.0);
    const Eigen::MatrixXcd H = reconstruct_channel(as_estimates({p}), Eigen::MatrixXcd::Ones(1, 1), kDesk);
    CHECK((H - Eigen::MatrixXcd(vectorize(steering_fresnel(kDesk, p)))).norm() < 1e-12);
    CHECK_THROWS_AS(reconstruct_channel(as_estimates({p}), Eigen::MatrixXcd::Ones(1, 2), kDesk), DimensionError);
}

TEST_CASE("nmse") {
    Rng rng(3);
    std::normal_distribution<double> z;
    Eigen::MatrixXcd H(20, 6);
    for (Eigen::Index i = 0; i < H.size(); ++i)
        H.data()[i] = {z(rng), z(rng)};
    CHECK(nmse(H, H).linear == 0.0);
    const Nmse zero = nmse(Eigen::MatrixXcd::Zero(20, 6), H);
    CHECK(zero.linear == Approx(1.0));
    CHECK(std::abs(zero.db) < 1e-12);
    const Nmse ninety = nmse((0.9 * H).eval(), H);
    CHECK(ninety.linear == Approx(0.01));
    CHECK(ninety.db == Approx(-20.0));

    Eigen::MatrixXcd E = H;
    for (Eigen::Index i = 0; i < E.size(); ++i)
        E.data()[i] += 0.1 * cd(z(rng), z(rng));
    const cd rot = std::polar(1.0, 1.234);
    CHECK(nmse((rot * E).eval(), (rot * H).eval()).linear == Approx(nmse(E, H).linear).epsilon(1e-12));

    std::vector<ChannelMatrix> a = {ChannelMatrix::Ones(2, 3)}, b = {ChannelMatrix::Constant(2, 3, cd(2.0))};
    CHECK(nmse(a, b).linear == Approx(0.25));
    CHECK_THROWS_AS(nmse(Eigen::MatrixXcd::Zero(2, 2), Eigen::MatrixXcd::Zero(2, 2)), std::domain_error);
    CHECK_THROWS_AS(nmse(Eigen::MatrixXcd::Zero(2, 2), Eigen::MatrixXcd::Ones(3, 2)), DimensionError);
}

TEST_CASE("noiseless on-grid pipeline is exact") {
    ExperimentConfig cfg;
    const PipelineConfig pc = cfg.pipeline(Solver::omp);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto ens = draw_trial(cfg, pc, seed, kFarField);
        const auto out = dere_pipeline(ens, pc);
        CHECK(support_match(ens.paths, out.estimate.paths, pc).all());
        CHECK(10 * std::log10(out.estimate.nmse_linear) <= -40.0);
        CHECK(out.diagnostics.dictionary_columns() == 33 + 17 + 3 * 32);
    }
}

TEST_CASE("noiseless vbi pipeline finds the angles") {
    // SBL can settle on a neighbouring distance column of the strongly
    // coherent desk-scale distance dictionary, so only angles are exact.
    ExperimentConfig cfg;
    const PipelineConfig pc = cfg.pipeline(Solver::vbi);
    int r_exact = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto ens = draw_trial(cfg, pc, seed, kFarField);
        const auto out = dere_pipeline(ens, pc);
        const auto m = support_match(ens.paths, out.estimate.paths, pc);
        CHECK(m.az);
        CHECK(m.el);
        r_exact += m.r;
        CHECK(10 * std::log10(out.estimate.nmse_linear) <= -25.0);
    }
    CHECK(r_exact >= 8);
}

TEST_CASE("higher SNR gives lower NMSE on matched seeds") {
    ExperimentConfig cfg;
    const PipelineConfig pc = cfg.pipeline(Solver::omp);
    std::vector<double> low, high;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        low.push_back(dere_pipeline(draw_trial(cfg, pc, seed, 0.0), pc).estimate.nmse_linear);
        high.push_back(dere_pipeline(draw_trial(cfg, pc, seed, 10.0), pc).estimate.nmse_linear);
    }
    CHECK(median(high) < median(low));
}

TEST_CASE("far-field boresight path") {
    auto pc = default_pipeline_config(kDesk, 1);
    pc.r_grid = distance_grid(5, 100, 16, true);
    const auto ens = generate_snapshots(kDesk, {path_at(0, 0)}, 20, kFarField, Wavefront::fresnel, 1);
    const auto out = dere_pipeline(ens, pc);
    REQUIRE(out.estimate.paths.size() == 1);
    CHECK(is_far_field(out.estimate.paths[0].distance_r));
    CHECK(out.estimate.paths[0].omega_y == 0.0);
    CHECK(out.estimate.paths[0].omega_z == 0.0);
}

TEST_CASE("pipeline diagnostics are reproducible") {
    ExperimentConfig cfg;
    const PipelineConfig pc = cfg.pipeline(Solver::vbi);
    const auto ens = draw_trial(cfg, pc, 42, 5.0);
    CHECK(diagnostics_json(dere_pipeline(ens, pc), false) == diagnostics_json(dere_pipeline(ens, pc), false));
}

TEST_CASE("pipeline stage errors name the stage") {
    auto pc = default_pipeline_config(kDesk, 3);
    pc.num_paths = 0;
    const auto ens = generate_snapshots(kDesk, {path_at(0, 0, 9.0)}, 2, kFarField, Wavefront::fresnel, 1);
    try {
        (void)dere_pipeline(ens, pc);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "config");
    }
}

TEST_CASE("joint oracle") {
    const ArrayGeometry g = ArrayGeometry::half_wavelength(9, 9, 30e9);
    const auto az = angle_grid(GridKind::azimuth, 8, dft_omega_max(8));
    const auto el = angle_grid(GridKind::elevation, 8, dft_omega_max(8));
    const auto rg = distance_grid(0.02, 0.64, 6);

    const auto single = generate_snapshots(g, {path_at(az[2], el[5], rg[3])}, 10, kFarField, Wavefront::fresnel, 3);
    const auto t = joint_3d_oracle(single, az, el, rg, 1);
    REQUIRE(t.size() == 1);
    CHECK(t[0].az == 2);
    CHECK(t[0].el == 5);
    CHECK(t[0].r == 3);

    const std::vector<PathParam> two = {path_at(az[1], el[6], rg[0], 0.6), path_at(az[5], el[2], rg[4], 0.4)};
    const auto ens = generate_snapshots(g, two, 1000, kFarField, Wavefront::fresnel, 8);
    auto pc = default_pipeline_config(g, 2, 0.02, 0.64, 6);
    const auto dere = dere_pipeline(ens, pc).estimate.paths;
    const auto oracle = joint_3d_oracle(ens, az, el, rg, 2);
    REQUIRE(dere.size() == 2);
    REQUIRE(oracle.size() == 2);
    std::vector<std::array<std::size_t, 3>> d, o;
    for (const auto& p : dere)
        d.push_back({az.nearest(p.omega_y), el.nearest(p.omega_z), rg.nearest(p.distance_r)});
    for (const auto& p : oracle)
        o.push_back({p.az, p.el, p.r});
    std::sort(d.begin(), d.end());
    std::sort(o.begin(), o.end());
    CHECK(d == o);

    const auto jd = build_joint_dictionary(g, az, el, rg);
    CHECK(jd.columns.cols() == 8 * 8 * 6);
    CHECK_THROWS_AS(build_joint_dictionary(g, az, el, rg, 100), GridError);
}
