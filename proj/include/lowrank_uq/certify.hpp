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

#include <functional>
#include <iosfwd>
#include <vector>

#include "lowrank_uq/confidence.hpp"
#include "lowrank_uq/measurement.hpp"
#include "lowrank_uq/quantiles.hpp"
#include "lowrank_uq/recovery.hpp"
#include "lowrank_uq/uq_frobenius.hpp"

namespace lowrank_uq {

struct CertificateConfig {
  double epsilon = 0.5;
  double delta = 0.1;
  DesignEnsemble ensemble;
  NoiseModel noise;
  /// Epoch cap; 0 means T = ceil(log2(d/ε)) + margin.
  int T_max = 0;
  int T_margin = 2;
  ConstantsRegime conf_constants = ConstantsRegime::Theory;
  RssMode rss_mode = RssMode::ImplicitSolve;
  PilotConfig pilot;
  /// Gaussian design only: use the U-statistic set (‖θ‖_F ≤ 1) once 2^m ≥ d².
  bool isotropic_ustat = false;
  double table_C = 1.0;
  double table_C_prime = 6.0;
  double ustat_C = 2.5;
  double ustat_C_prime = 6.0;
};

struct EpochRecord {
  int m = 0;
  int budget = 0;  // 2^{m+1}
  Method method = Method::RSS;
  double statistic = 0.0;
  double radius_sq = 0.0;
  double radius = 0.0;
};

struct Certificate {
  int n_hat = 0;
  QuantumState theta_hat = QuantumState::maximally_mixed(1);
  std::vector<EpochRecord> epoch_log;
  bool stopped = false;
  double epsilon = 0.0;
  double delta = 0.0;
  int T = 0;
  double alpha = 0.0;
};

/// Live data source: measures the requested plan and returns the outcomes.
using MeasurementOracle = std::function<MeasurementBatch(const SensingPlan&)>;

/// ceil(log2(d/ε)) + margin.
int epoch_horizon(int d, double epsilon, int margin);

void validate(const CertificateConfig& cfg);

/// Doubling epochs m = 1, 2, ...: 2^m measurements build a pilot projected to
/// the state space, 2^m fresh ones a confidence set at level δ/(3T). Stops
/// once the set's Frobenius radius is ≤ ε, or at the epoch cap.
Certificate run_certificate(const MeasurementOracle& oracle, const CertificateConfig& cfg, Rng& rng);

/// Simulation mode: measurements of `theta` through cfg.noise.
Certificate run_certificate(const QuantumState& theta, const CertificateConfig& cfg, Rng& rng);

/// Columns: m,budget,method,statistic,radius_sq,radius.
void write_epoch_log_csv(std::ostream& os, const Certificate& cert, bool header = true);

}  // namespace lowrank_uq
