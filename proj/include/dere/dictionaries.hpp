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

#include "dere/geometry.hpp"

namespace dere {

class GridError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class GridKind { azimuth, elevation, distance };

/// Ordered sampling points of one parameter. Angle grids hold direction
/// cosines, strictly increasing and symmetric about zero. Distance grids hold
/// metres in increasing order (so 1/r strictly decreases), optionally ending
/// with kFarField.
class ParameterGrid {
  public:
    ParameterGrid(GridKind kind, std::vector<double> values);

    GridKind kind() const { return kind_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t count() const { return values_.size(); }
    bool is_angular() const { return kind_ != GridKind::distance; }

    /// Index of the closest grid point; distances are compared in 1/r.
    std::size_t nearest(double value) const;

  private:
    GridKind kind_;
    std::vector<double> values_;
};

/// count cosines uniformly covering [-omega_max, omega_max]. Zero is a grid
/// point whenever count is odd. Throws GridError when omega_max reaches the
/// doubled-phase ambiguity bound lambda / (4 d).
ParameterGrid angle_grid(GridKind kind, int count, double omega_max, double spacing_over_wavelength = 0.5);

/// Half-span of the count-point DFT grid of the doubled-phase dictionary:
/// (count - 1) / count * lambda / (4 d). Adjacent columns of that grid are orthogonal.
double dft_omega_max(int count, double spacing_over_wavelength = 0.5);

// r_i = 1 / s_i with s_i uniform on [1/r_max, 1/r_min]
ParameterGrid distance_grid(double r_min, double r_max, int count, bool include_far_field = false);

// Uniform in r; only used to compare against reciprocal sampling.
ParameterGrid distance_grid_uniform(double r_min, double r_max, int count);

class Dictionary {
  public:
    Dictionary(Eigen::MatrixXcd columns, ParameterGrid grid);

    const Eigen::MatrixXcd& columns() const { return columns_; }
    const ParameterGrid& grid() const { return grid_; }
    Eigen::Index axis_length() const { return columns_.rows(); }
    Eigen::Index size() const { return columns_.cols(); }
    /// Cached max |<c_i, c_j>| over distinct columns, 0 for a single column.
    double mutual_coherence() const { return coherence_; }

  private:
    Eigen::MatrixXcd columns_;
    ParameterGrid grid_;
    double coherence_ = 0.0;
};

/// Column i has entries exp(j f k d m Omega_i) / sqrt(axis_length), m over the
/// symmetric index range, with f = 2 when doubled (matching C, W_theta, W_phi).
Dictionary angle_dictionary(int axis_length, double spacing_over_wavelength, const ParameterGrid& grid,
                            bool doubled = true);

/// Unit-norm vectorized Fresnel steering matrices along one direction, one
/// column per distance. A far-field grid point yields the planar column.
Dictionary distance_dictionary(const ArrayGeometry& geom, const Cosines& direction, const ParameterGrid& grid);

/// max over distinct column pairs of |<c_i, c_j>|; GridError for fewer than two columns.
double coherence(const Dictionary& dict);
double coherence(const Eigen::MatrixXcd& unit_columns);

// Flattens a channel-shaped matrix in element order (n outer, m inner).
inline Eigen::Map<const Eigen::VectorXcd> vectorize(const ChannelMatrix& M) {
    return {M.data(), M.size()};
}

} // namespace dere
