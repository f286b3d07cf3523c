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

#include "dere/decomposition.hpp"

namespace dere {

namespace {

ChannelMatrix as_channel(const ArrayGeometry& geom, const Eigen::VectorXcd& v) {
    return Eigen::Map<const ChannelMatrix>(v.data(), geom.n_z(), geom.n_y());
}

} // namespace

ChannelMatrix covariance_symmetric(const SnapshotEnsemble& ens, const DecompositionOptions& opt) {
    const auto& geom = ens.geometry;
    const auto& Y = ens.observations;
    // (m,n) -> (-m,-n) reverses the element order
    const Eigen::VectorXcd c =
        (Y.array() * Y.colwise().reverse().array().conjugate()).rowwise().sum() / double(ens.snapshot_count());
    ChannelMatrix C = as_channel(geom, c);
    if (opt.debias_center)
        C(geom.half_z(), geom.half_y()) -= ens.noise_variance;
    return C;
}

ChannelMatrix sparse_function_azimuth(const ChannelMatrix& C) {
    // reversing the row order maps n -> -n
    return 0.5 * (C + C.colwise().reverse());
}

ChannelMatrix sparse_function_elevation(const ChannelMatrix& C) {
    return 0.5 * (C + C.rowwise().reverse());
}

ChannelMatrix covariance_origin(const SnapshotEnsemble& ens, const DecompositionOptions& opt) {
    const auto& geom = ens.geometry;
    const auto& Y = ens.observations;
    const Eigen::Index centre = Y.rows() / 2;
    const Eigen::VectorXcd w = Y * Y.row(centre).adjoint() / double(ens.snapshot_count());
    ChannelMatrix W = as_channel(geom, w);
    if (opt.debias_center)
        W(geom.half_z(), geom.half_y()) -= ens.noise_variance;
    return W;
}

SparseFunctionSet decompose(const SnapshotEnsemble& ens, const DecompositionOptions& opt) {
    SparseFunctionSet out;
    out.C = covariance_symmetric(ens, opt);
    out.W_theta = sparse_function_azimuth(out.C);
    out.W_phi = sparse_function_elevation(out.C);
    out.W_r = covariance_origin(ens, opt);
    out.snapshot_count = ens.snapshot_count();
    return out;
}

ChannelMatrix population_covariance_symmetric(const ArrayGeometry& geom, const std::vector<PathParam>& paths) {
    ChannelMatrix C = geom.zeros();
    const double kd2 = 2.0 * geom.wavenumber() * geom.spacing();
    for (const auto& p : paths) {
        const Cosines c = p.cosines();
        for (int n = -geom.half_z(); n <= geom.half_z(); ++n)
            for (int m = -geom.half_y(); m <= geom.half_y(); ++m)
                C(geom.row_of(n), geom.col_of(m)) += p.power * std::polar(1.0, kd2 * (m * c.omega_y + n * c.omega_z));
    }
    return C;
}

ChannelMatrix population_covariance_origin(const ArrayGeometry& geom, const std::vector<PathParam>& paths) {
    ChannelMatrix W = geom.zeros();
    for (const auto& p : paths)
        W += p.power * steering_fresnel(geom, p);
    return W;
}

PowerSpectra power_spectrum_diagnostics(const SnapshotEnsemble& ens, const SpectrumRequest& req) {
    if (req.az_cosines.empty() || req.el_cosines.empty() || req.distances.empty())
        throw DomainError("spectrum grids must be non-empty");
    const auto& geom = ens.geometry;
    const ChannelMatrix W = covariance_origin(ens);
    const double norm = std::sqrt(double(geom.element_count()));

    PowerSpectra out;
    out.angular.resize(Eigen::Index(req.el_cosines.size()), Eigen::Index(req.az_cosines.size()));
    double best = -1.0;
    for (Eigen::Index iz = 0; iz < out.angular.rows(); ++iz) {
        for (Eigen::Index iy = 0; iy < out.angular.cols(); ++iy) {
            const double oy = req.az_cosines[std::size_t(iy)];
            const double oz = req.el_cosines[std::size_t(iz)];
            double v = 0.0;
            if (cosines_realizable(oy, oz)) {
                const ChannelMatrix a = steering_fresnel(geom, oy, oz, req.fixed_r);
                v = std::abs((a.conjugate().array() * W.array()).sum()) / norm;
            }
            out.angular(iz, iy) = v;
            if (v > best) {  // strict: ties keep the lowest index
                best = v;
                out.az_peak = iy;
                out.el_peak = iz;
            }
        }
    }

    out.distance_direction = req.direction.value_or(
        Cosines{req.az_cosines[std::size_t(out.az_peak)], req.el_cosines[std::size_t(out.el_peak)]});
    if (!cosines_realizable(out.distance_direction.omega_y, out.distance_direction.omega_z))
        throw InvalidDirection("distance spectrum direction is not realizable");
    best = -1.0;
    for (std::size_t i = 0; i < req.distances.size(); ++i) {
        const ChannelMatrix a = steering_fresnel(geom, out.distance_direction.omega_y,
                                                 out.distance_direction.omega_z, req.distances[i]);
        const double v = std::abs((a.conjugate().array() * W.array()).sum()) / norm;
        out.distance.push_back(v);
        if (v > best) {
            best = v;
            out.r_peak = Eigen::Index(i);
        }
    }
    return out;
}

} // namespace dere
