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

#include "dere/dictionaries.hpp"

#include <algorithm>

#include "dere/channel_model.hpp"

namespace dere {

ParameterGrid::ParameterGrid(GridKind kind, std::vector<double> values) : kind_(kind), values_(std::move(values)) {
    if (values_.empty())
        throw GridError("grid must contain at least one point");
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (!(values_[i] > values_[i - 1]))
            throw GridError("grid values must be strictly increasing");
    if (is_angular()) {
        const std::size_t n = values_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(values_[i]) || std::abs(values_[i]) >= 1.0)
                throw GridError("angle grid cosines must lie in (-1, 1)");
            if (std::abs(values_[i] + values_[n - 1 - i]) > 1e-12)
                throw GridError("angle grid must be symmetric about zero");
        }
    } else {
        if (!(values_.front() > 0.0))
            throw GridError("distance grid values must be positive");
        for (std::size_t i = 0; i + 1 < values_.size(); ++i)
            if (is_far_field(values_[i]))
                throw GridError("only the last distance grid point may be far-field");
    }
}

std::size_t ParameterGrid::nearest(double value) const {
    auto key = [this](double v) { return is_angular() ? v : (is_far_field(v) ? 0.0 : 1.0 / v); };
    const double target = key(value);
    std::size_t best = 0;
    double best_gap = std::abs(key(values_[0]) - target);
    for (std::size_t i = 1; i < values_.size(); ++i) {
        const double gap = std::abs(key(values_[i]) - target);
        if (gap < best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    return best;
}

ParameterGrid angle_grid(GridKind kind, int count, double omega_max, double spacing_over_wavelength) {
    if (kind == GridKind::distance)
        throw GridError("angle_grid needs an angular grid kind");
    if (count < 2)
        throw GridError("angle grid needs at least two points");
    if (!(spacing_over_wavelength > 0.0))
        throw GridError("element spacing must be positive");
    const double bound = 0.25 / spacing_over_wavelength;
    if (!(omega_max > 0.0) || !(omega_max < bound))
        throw GridError("omega_max must lie in (0, " + std::to_string(bound) +
                        "); larger cosines alias in the doubled phase progression");
    std::vector<double> v(static_cast<std::size_t>(count));
    const double step = 2.0 * omega_max / double(count - 1);
    for (int i = 0; i < count; ++i) {
        // mirror the lower half so the grid is exactly symmetric
        const int j = count - 1 - i;
        v[std::size_t(i)] = i <= j ? -omega_max + i * step : omega_max - j * step;
    }
    if (count % 2 == 1)
        v[std::size_t(count / 2)] = 0.0;
    return {kind, std::move(v)};
}

double dft_omega_max(int count, double spacing_over_wavelength) {
    if (count < 2)
        throw GridError("angle grid needs at least two points");
    if (!(spacing_over_wavelength > 0.0))
        throw GridError("element spacing must be positive");
    return double(count - 1) / double(count) * 0.25 / spacing_over_wavelength;
}

ParameterGrid distance_grid(double r_min, double r_max, int count, bool include_far_field) {
    if (!(r_min > 0.0) || !(r_max > r_min) || std::isinf(r_max))
        throw GridError("distance grid needs 0 < r_min < r_max < inf");
    if (count < 2)
        throw GridError("distance grid needs at least two points");
    const double s_lo = 1.0 / r_max, s_hi = 1.0 / r_min;
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double s = s_hi - (s_hi - s_lo) * double(i) / double(count - 1);
        v[std::size_t(i)] = 1.0 / s;
    }
    v.front() = r_min;
    v.back() = r_max;
    if (include_far_field)
        v.push_back(kFarField);
    return {GridKind::distance, std::move(v)};
}

ParameterGrid distance_grid_uniform(double r_min, double r_max, int count) {
    if (!(r_min > 0.0) || !(r_max > r_min) || std::isinf(r_max))
        throw GridError("distance grid needs 0 < r_min < r_max < inf");
    if (count < 2)
        throw GridError("distance grid needs at least two points");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[std::size_t(i)] = r_min + (r_max - r_min) * double(i) / double(count - 1);
    return {GridKind::distance, std::move(v)};
}

double coherence(const Eigen::MatrixXcd& unit_columns) {
    if (unit_columns.cols() < 2)
        throw GridError("coherence needs at least two columns");
    const Eigen::MatrixXcd gram = unit_columns.adjoint() * unit_columns;
    double mu = 0.0;
    for (Eigen::Index j = 0; j < gram.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i)
            mu = std::max(mu, std::abs(gram(i, j)));
    return std::min(mu, 1.0);
}

double coherence(const Dictionary& dict) { return coherence(dict.columns()); }

Dictionary::Dictionary(Eigen::MatrixXcd columns, ParameterGrid grid)
    : columns_(std::move(columns)), grid_(std::move(grid)) {
    if (Eigen::Index(grid_.count()) != columns_.cols())
        throw GridError("dictionary column count must equal the grid size");
    for (Eigen::Index j = 0; j < columns_.cols(); ++j)
        if (std::abs(columns_.col(j).norm() - 1.0) > 1e-10)
            throw GridError("dictionary columns must have unit norm");
    coherence_ = columns_.cols() >= 2 ? coherence(columns_) : 0.0;
}

Dictionary angle_dictionary(int axis_length, double spacing_over_wavelength, const ParameterGrid& grid,
                            bool doubled) {
    if (!grid.is_angular())
        throw GridError("angle dictionary needs an angular grid");
    if (axis_length < 1 || axis_length % 2 == 0)
        throw GridError("axis length must be odd and positive");
    const int half = (axis_length - 1) / 2;
    const double scale = (doubled ? 2.0 : 1.0) * 2.0 * std::numbers::pi * spacing_over_wavelength;
    const double amp = 1.0 / std::sqrt(double(axis_length));
    Eigen::MatrixXcd A(axis_length, Eigen::Index(grid.count()));
    for (Eigen::Index i = 0; i < A.cols(); ++i)
        for (int m = -half; m <= half; ++m)
            A(m + half, i) = std::polar(amp, scale * m * grid[std::size_t(i)]);
    return {std::move(A), grid};
}

Dictionary distance_dictionary(const ArrayGeometry& geom, const Cosines& direction, const ParameterGrid& grid) {
    if (grid.is_angular())
        throw GridError("distance dictionary needs a distance grid");
    if (!cosines_realizable(direction.omega_y, direction.omega_z))
        throw InvalidDirection("distance dictionary direction is not realizable");
    const double amp = 1.0 / std::sqrt(double(geom.element_count()));
    Eigen::MatrixXcd A(geom.element_count(), Eigen::Index(grid.count()));
    for (Eigen::Index i = 0; i < A.cols(); ++i) {
        const ChannelMatrix a = steering_fresnel(geom, direction.omega_y, direction.omega_z, grid[std::size_t(i)]);
        A.col(i) = amp * vectorize(a);
    }
    return {std::move(A), grid};
}

} // namespace dere
