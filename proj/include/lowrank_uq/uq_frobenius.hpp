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

#include "lowrank_uq/confidence.hpp"
#include "lowrank_uq/measurement.hpp"
#include "lowrank_uq/quantiles.hpp"

namespace lowrank_uq {

/// r̂ = (1/n)‖Y − 𝒳·center‖² − σ². Unbiased for ‖θ − center‖²_F; may be negative.
double rss_statistic(const MeasurementBatch& batch, const HermitianMatrix& center, double sigma);

/// r̃ = (2/n) Σ_{i ≤ n/2} (Y_i − ⟨X^i, c⟩)(Y_{i+n/2} − ⟨X^i, c⟩) for a batch whose
/// second half repeats the designs of the first. Needs no knowledge of σ.
double paired_rss_statistic(const MeasurementBatch& batch, const HermitianMatrix& center);

/// (2/(n(n−1))) Σ_{i<j} ⟨Y_iX^i − c, Y_jX^j − c⟩, computed in O(n d²).
double ustat_statistic(const MeasurementBatch& batch, const HermitianMatrix& center);

/// (1/n)‖Z̃‖² − σ²d²/n on a full-basis Pauli batch (each index exactly m times).
double reavg_statistic(const MeasurementBatch& batch, const HermitianMatrix& center, double sigma,
                       bool subtract_noise = true);

/// Largest x ≥ 0 with x = a + b√x (b ≥ 0); 0 when there is none.
double largest_sqrt_root(double a, double b);

enum class RssMode { ShapeConstrained, ImplicitSolve };

struct RssOptions {
  RssMode mode = RssMode::ShapeConstrained;
  /// Pauli deviation constant; 0 for Gaussian design.
  double z = 0.0;
  ConstantsRegime regime = ConstantsRegime::Theory;
  /// Chebyshev constants for Bernoulli errors: ξ = z_α = √(1/α), and σ is the
  /// variance bound √v.
  bool bernoulli = false;
  /// Subtract σ² from the statistic. Dropped for Bernoulli data with T ≥ n.
  bool subtract_noise = true;
  /// Use the paired statistic (designs duplicated across halves, σ unknown).
  bool paired = false;
  double table_C = 1.0;
  double table_C_prime = 6.0;
};

/// Squared radius of the RSS set for a given statistic value. In the theory
/// regime: x = 2(r̂ + zd/n + (z̄ + ξ)/√n) with z̄² = z_{α/3}σ² max(3x, 4zd/n),
/// x replaced by 4 in shape-constrained mode.
double rss_radius_sq(double stat, int n, int d, double sigma, double alpha, const RssOptions& opts);

ConfidenceReport rss_confidence_set(const MeasurementBatch& batch, const HermitianMatrix& center,
                                    double sigma, double alpha, const RssOptions& opts = {});

/// √(r̂⁺ + C/√n + C′√r̂⁺/√n), r̂⁺ = max(r̂, 0).
double rss_table_radius(double r_hat, int n, double C = 1.0, double C_prime = 6.0);

struct UStatConstants {
  ConstantsRegime regime = ConstantsRegime::Simulation;
  double C1 = 0.0;
  double C2 = 0.0;
  double C = 2.5;
  double C_prime = 6.0;

  static UStatConstants theory(double C1, double C2);
  static UStatConstants simulation(double C = 2.5, double C_prime = 6.0);
  /// Chebyshev choices ζ = O(√(1/α)) for ‖θ‖_F ≤ M and σ² ≤ v:
  /// C1 = 2√(2(3M² + v)/α), C2 = 2√(2/α)(M² + v)√(1 + 3/d²)√(n/(n−1)).
  static UStatConstants from_level(double alpha, double v, int d, int n, double M = 1.0);
};

/// Theory: largest x with x ≤ R̂⁺ + C1√x/√n + C2 d/n. Simulation:
/// R̂⁺ + C d/n + C′√R̂⁺/√n.
double ustat_radius_sq(double stat, int n, int d, const UStatConstants& c);

ConfidenceReport ustat_confidence_set(const MeasurementBatch& batch, const HermitianMatrix& center,
                                      double alpha, const UStatConstants& c);

/// Largest x with x ≤ R̂ + z_{α/2}σ√x/√n + ξ_{α/2,σ}(d²)·d/n.
double reavg_radius_sq(double stat, int n, int d, double sigma, double alpha);

ConfidenceReport reavg_confidence_set(const MeasurementBatch& batch, const HermitianMatrix& center,
                                      double sigma, double alpha, bool subtract_noise = true);

}  // namespace lowrank_uq
