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

#include "dere/geometry.hpp"

#include <string>

namespace dere {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

ArrayGeometry::ArrayGeometry(int n_y, int n_z, double spacing_d, double wavelength)
    : n_y_(n_y), n_z_(n_z), spacing_d_(spacing_d), wavelength_(wavelength) {
    if (n_y < 1 || n_y % 2 == 0)
        throw InvalidGeometry("n_y must be odd and positive, got " + std::to_string(n_y));
    if (n_z < 1 || n_z % 2 == 0)
        throw InvalidGeometry("n_z must be odd and positive, got " + std::to_string(n_z));
    if (!(spacing_d > 0.0) || !std::isfinite(spacing_d))
        throw InvalidGeometry("element spacing must be positive");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw InvalidGeometry("wavelength must be positive");
}

ArrayGeometry ArrayGeometry::half_wavelength(int n_y, int n_z, double carrier_hz) {
    if (!(carrier_hz > 0.0))
        throw InvalidGeometry("carrier frequency must be positive");
    const double lambda = kSpeedOfLight / carrier_hz;
    return ArrayGeometry(n_y, n_z, 0.5 * lambda, lambda);
}

double ArrayGeometry::aperture() const {
    const double ly = (n_y_ - 1) * spacing_d_;
    const double lz = (n_z_ - 1) * spacing_d_;
    return std::sqrt(ly * ly + lz * lz);
}

std::vector<Element> element_positions(const ArrayGeometry& geom) {
    std::vector<Element> out;
    out.reserve(static_cast<std::size_t>(geom.element_count()));
    const double d = geom.spacing();
    for (int n = -geom.half_z(); n <= geom.half_z(); ++n)
        for (int m = -geom.half_y(); m <= geom.half_y(); ++m)
            out.push_back({m, n, {0.0, m * d, n * d}});
    return out;
}

Direction::Direction(double theta_, double phi_) : theta(theta_), phi(phi_) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (!(std::abs(theta_) < half_pi) || !(std::abs(phi_) < half_pi))
        throw InvalidDirection("azimuth and elevation must lie in (-pi/2, pi/2)");
}

Cosines direction_cosines(const Direction& dir) {
    return {std::cos(dir.phi) * std::sin(dir.theta), std::sin(dir.phi)};
}

bool cosines_realizable(double omega_y, double omega_z) {
    return std::isfinite(omega_y) && std::isfinite(omega_z) && omega_z * omega_z < 1.0 &&
           omega_y * omega_y < 1.0 - omega_z * omega_z;
}

Direction direction_from_cosines(double omega_y, double omega_z) {
    if (!cosines_realizable(omega_y, omega_z))
        throw InvalidDirection("direction cosines (" + std::to_string(omega_y) + ", " +
                               std::to_string(omega_z) + ") are not realizable");
    const double phi = std::asin(omega_z);
    const double theta = std::asin(omega_y / std::cos(phi));
    return Direction(theta, phi);
}

double rayleigh_distance(const ArrayGeometry& geom) {
    const double D = geom.aperture();
    return 2.0 * D * D / geom.wavelength();
}

} // namespace dere
