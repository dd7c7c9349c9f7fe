// Copyright 2026 The lowrank-uq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace lowrank_uq::tol {

/// Hermiticity check applied on construction, relative to max(1, ‖A‖_F).
inline constexpr double kHermitian = 1e-12;
/// Unit-trace and positivity slack for quantum states.
inline constexpr double kState = 1e-10;
/// Maximal imaginary part tolerated in tr(X A).
inline constexpr double kRealTrace = 1e-10;
/// Probability slack in the Bernoulli measurement channel.
inline constexpr double kProbability = 1e-9;
/// Relative reconstruction residual accepted from the eigensolver.
inline constexpr double kEigenResidual = 1e-9;

}  // namespace lowrank_uq::tol
