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
#include <iosfwd>
#include <optional>
#include <string>

#include "lowrank_uq/matrix.hpp"
#include "lowrank_uq/sensing.hpp"

namespace lowrank_uq {

/// Either Gaussian noise N(0, σ²) with a declared variance bound v ≥ σ², or
/// the Bernoulli Pauli channel with T preparations per observable.
class NoiseModel {
 public:
  enum class Kind { Gaussian, BernoulliPauli };

  static NoiseModel gaussian(double sigma);
  static NoiseModel gaussian(double sigma, double variance_bound);
  static NoiseModel bernoulli(int preparations);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  int preparations() const { return preparations_; }
  /// Known variance bound v: σ² (or the declared bound) for Gaussian noise,
  /// d/T for the Bernoulli channel.
  double variance_bound(int d) const;
  /// "gaussian:<σ>" or "bernoulli:<T>".
  std::string describe() const;
  static NoiseModel parse(const std::string& s);

 private:
  Kind kind_ = Kind::Gaussian;
  double sigma_ = 0.0;
  double variance_bound_ = 0.0;
  int preparations_ = 0;
};

struct MeasurementBatch {
  SensingPlan plan;
  RVec y;
  NoiseModel noise;
  std::optional<std::string> true_state_tag;

  int n() const { return plan.n(); }
  int dim() const { return plan.dim(); }
  /// Batches built from distinct plans carry distinct ids.
  std::uint64_t id() const { return plan.id(); }
};

/// Checks length(y) == plan.n().
MeasurementBatch make_batch(SensingPlan plan, RVec y, NoiseModel noise);

/// y_i = tr(X^i θ) + ε_i, ε_i ~ N(0, σ²).
MeasurementBatch measure_gaussian(const SensingPlan& plan, const HermitianMatrix& theta,
                                  double sigma, Rng& rng);

/// P(B = 1) = (1 + √d tr(E θ))/2 for one basis element. Throws if the value
/// leaves [0, 1] beyond tolerance (θ not a state, or a basis mismatch).
double outcome_probability(const PauliElement& element, const QuantumState& theta);

/// y_i = (√d/T) Σ_j B_ij with B_ij = ±1 and P(B = 1) = (1 + √d tr(E_i θ))/2.
MeasurementBatch measure_bernoulli_pauli(const SensingPlan& plan, const QuantumState& theta,
                                         int preparations, Rng& rng);

/// Dispatches on the noise kind.
MeasurementBatch measure(const SensingPlan& plan, const QuantumState& theta,
                         const NoiseModel& noise, Rng& rng);

/// CSV with a '#' header line "kind d n noise seed" and rows (i, design, y_i).
/// Gaussian designs are referenced by the plan seed and draw position.
void write_batch_csv(std::ostream& os, const MeasurementBatch& batch);
MeasurementBatch read_batch_csv(std::istream& is);

}  // namespace lowrank_uq
