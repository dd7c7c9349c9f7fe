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

#include <cstdint>

#include "lowrank_uq/confidence.hpp"
#include "lowrank_uq/measurement.hpp"
#include "lowrank_uq/recovery.hpp"

namespace lowrank_uq {

struct NuclearSetConfig {
  /// Radius constant: the set is ‖v − ϑ̂‖_{S1} ≤ C√k̂·r_n(k̂).
  double C = 2.0;
  /// v_n = c_v(r_n(d)τ_n(d) + √(d/n)).
  double c_v = 1.0;
  RateFunction rate;
  /// Warn when k̂√(d log d / n) exceeds this.
  double regime_threshold = 0.5;
};

struct EigenvalueEstimate {
  RVec lambdas;  // descending, clipped at 0
  double v_n = 0.0;
  std::uint64_t source_id = 0;
};

double eigen_deviation_scale(const NuclearSetConfig& cfg);

/// θ̂′ = θ̃ + (1/n)Σ X^i (Y_i − tr(X^iθ̃)) from a batch independent of θ̃;
/// returns the spectrum of its PSD clip.
EigenvalueEstimate eigenvalue_estimator(const MeasurementBatch& second, const HermitianMatrix& pilot,
                                        const NuclearSetConfig& cfg);

/// Smallest k with ‖best_rank_k(pilot) − pilot‖_F ≤ r_n(k) and
/// 1 − Σ_{j≤k} λ̂_j ≤ 2k√(d/n); d if none.
int select_k_hat(const HermitianMatrix& pilot, const EigenvalueEstimate& est,
                 const RateFunction& rate);

/// Center ϑ̂ = projection of the pilot onto rank-2k̂ states, radius² = (C√k̂ r_n(k̂))².
ConfidenceReport nuclear_confidence_set(const HermitianMatrix& pilot, const EigenvalueEstimate& est,
                                        const NuclearSetConfig& cfg, double alpha = 0.1);

struct NuclearRun {
  HermitianMatrix pilot;
  EigenvalueEstimate eigen;
  ConfidenceReport report;
};

/// Full sample-splitting pipeline: pilot from the first batch, eigenvalues and
/// set from the second. Throws if both batches share an identity.
NuclearRun nuclear_pipeline(const MeasurementBatch& first, const MeasurementBatch& second,
                            const NuclearSetConfig& cfg, const PilotConfig& pilot_cfg,
                            double alpha = 0.1);

}  // namespace lowrank_uq
