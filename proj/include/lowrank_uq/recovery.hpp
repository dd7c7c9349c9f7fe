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

#include <utility>

#include "lowrank_uq/matrix.hpp"
#include "lowrank_uq/measurement.hpp"

namespace lowrank_uq {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nuclear-norm penalized least squares solved by proximal gradient with a
/// fixed step 1/L, L the top eigenvalue of 𝒳†𝒳/n (power iteration).
struct PilotConfig {
  /// λ = lambda_scale·σ·√(d/n). The noise term (1/n)Σε_iX^i of a hermitized
  /// Gaussian design has operator norm ≈ √2·σ√(d/n), so 1 sits just below it.
  double lambda_scale = 1.0;
  int max_iters = 500;
  /// Stop once the gradient-mapping norm L‖θ_{k+1} − θ_k‖_F falls below this.
  double grad_tol = 1e-7;
  int power_iters = 60;
};

/// r_n(k) = 2σ √(D k d / n): the pilot risk contract ‖θ̃ − θ‖²_F ≤ r_n(k)²/4.
struct RateFunction {
  double D = 1.0;
  double sigma = 0.0;
  int d = 1;
  int n = 1;

  double operator()(int k) const;
};

struct PilotResult {
  HermitianMatrix estimate;
  int iterations = 0;
  double objective = 0.0;
  double lambda = 0.0;
  double lipschitz = 0.0;
  bool converged = false;
};

/// Noise level used to scale λ: σ for Gaussian noise, √(d/T) for the
/// Bernoulli channel.
double noise_scale(const MeasurementBatch& batch);

/// Largest eigenvalue of M ↦ adjoint_average(𝒳M) on Hermitian matrices.
double sampling_lipschitz(const SensingPlan& plan, int iters);

/// (1/2n)‖y − 𝒳θ‖² + λ‖θ‖_{S1}.
double pilot_objective(const MeasurementBatch& batch, const HermitianMatrix& theta, double lambda);

/// Eigenvalue soft-thresholding: prox of t‖·‖_{S1}.
HermitianMatrix soft_threshold_spectrum(const HermitianMatrix& a, double t);

/// Throws SolverError when the objective increases on 10 consecutive steps.
PilotResult solve_pilot(const MeasurementBatch& batch, const PilotConfig& cfg);
HermitianMatrix pilot_estimate(const MeasurementBatch& batch, const PilotConfig& cfg);

/// Smallest k' with ‖pilot − best_rank_k(pilot, k')‖_F ≤ r_n(k')/2, and that
/// truncation.
std::pair<HermitianMatrix, int> rank_reduce(const HermitianMatrix& pilot, const RateFunction& rate);

QuantumState pilot_to_state(const HermitianMatrix& pilot);

}  // namespace lowrank_uq
