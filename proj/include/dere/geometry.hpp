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
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dere {

using cd = std::complex<double>;

// Channel-shaped matrices are n_z x n_y, row index n (vertical), column index m (horizontal).
// Row-major storage makes the flat layout identical to the element ordering (n outer, m inner).
using ChannelMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Distance value used for a planar (far-field) path; 1/r evaluates to 0.
inline constexpr double kFarField = std::numeric_limits<double>::infinity();

inline bool is_far_field(double r) { return std::isinf(r) && r > 0; }

class InvalidGeometry : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class InvalidDirection : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Uniform planar array in the x = 0 plane, centred on the origin.
///
/// Element (m, n) sits at (0, m*d, n*d) with m in [-(n_y-1)/2, (n_y-1)/2] and
/// n in [-(n_z-1)/2, (n_z-1)/2]. Both dimensions must be odd so that the
/// centre element and every point-symmetric partner exist.
class ArrayGeometry {
  public:
    ArrayGeometry(int n_y, int n_z, double spacing_d, double wavelength);

    /// Half-wavelength spaced array at the given carrier frequency.
    static ArrayGeometry half_wavelength(int n_y, int n_z, double carrier_hz);

    int n_y() const { return n_y_; }
    int n_z() const { return n_z_; }
    int half_y() const { return (n_y_ - 1) / 2; }
    int half_z() const { return (n_z_ - 1) / 2; }
    int element_count() const { return n_y_ * n_z_; }
    double spacing() const { return spacing_d_; }
    double wavelength() const { return wavelength_; }
    double wavenumber() const { return 2.0 * std::numbers::pi / wavelength_; }
    double spacing_over_wavelength() const { return spacing_d_ / wavelength_; }

    // Storage row/column of a signed element index.
    Eigen::Index row_of(int n) const { return n + half_z(); }
    Eigen::Index col_of(int m) const { return m + half_y(); }

    /// Diagonal of the element bounding box.
    double aperture() const;

    /// Largest |cosine| whose doubled phase progression 2kd*Omega stays unambiguous.
    double unambiguous_cosine() const { return wavelength_ / (4.0 * spacing_d_); }

    ChannelMatrix zeros() const { return ChannelMatrix::Zero(n_z_, n_y_); }

    bool operator==(const ArrayGeometry&) const = default;

  private:
    int n_y_;
    int n_z_;
    double spacing_d_;
    double wavelength_;
};

struct Element {
    int m;
    int n;
    std::array<double, 3> position;
};

/// One entry per element, row-major over (n, m); the (0,0) entry sits at the origin.
std::vector<Element> element_positions(const ArrayGeometry& geom);

/// Azimuth theta and elevation phi in radians, both in (-pi/2, pi/2).
struct Direction {
    double theta = 0.0;
    double phi = 0.0;

    Direction() = default;
    Direction(double theta_, double phi_);

    bool operator==(const Direction&) const = default;
};

struct Cosines {
    double omega_y = 0.0;
    double omega_z = 0.0;

    bool operator==(const Cosines&) const = default;
};

// Omega_y = cos(phi) sin(theta), Omega_z = sin(phi)
Cosines direction_cosines(const Direction& dir);

/// Inverse of direction_cosines. Throws InvalidDirection when the pair does not
/// describe a front half-space direction (Omega_z^2 >= 1 or Omega_y^2 >= 1 - Omega_z^2).
Direction direction_from_cosines(double omega_y, double omega_z);

bool cosines_realizable(double omega_y, double omega_z);

// 2 D^2 / lambda
double rayleigh_distance(const ArrayGeometry& geom);

} // namespace dere
