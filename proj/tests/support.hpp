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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dere/reconstruction.hpp"

namespace dere::test {

inline PathParam path_at(double omega_y, double omega_z, double r = kFarField, double power = 1.0) {
    return {direction_from_cosines(omega_y, omega_z), r, power};
}

inline double max_abs_phase_gap(const ChannelMatrix& a, const ChannelMatrix& b) {
    double worst = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(std::arg(a.data()[i] * std::conj(b.data()[i]))));
    return worst;
}

// Relative Frobenius error |a - b| / |b|.
template <class A, class B>
double rel_err(const A& a, const B& b) {
    return (a - b).norm() / b.norm();
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace dere::test
