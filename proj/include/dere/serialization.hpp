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

#include <string>

#include "dere/reconstruction.hpp"

namespace dere {

// Pretty-printed JSON documents. Non-finite numbers are written as the
// strings "inf", "-inf" and null (NaN).

/// Stage atoms, residuals, traces, column counts and timings of one pipeline run.
std::string diagnostics_json(const PipelineOutput& out, bool include_timings = false);

/// Geometry, ground-truth paths and ensemble metadata (no snapshot data).
std::string ensemble_json(const SnapshotEnsemble& ens);

} // namespace dere
