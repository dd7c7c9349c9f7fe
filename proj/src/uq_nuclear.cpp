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

#include "lowrank_uq/uq_nuclear.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lowrank_uq/sensing.hpp"
#include "lowrank_uq/tolerances.hpp"

namespace lowrank_uq {

double eigen_deviation_scale(const NuclearSetConfig& cfg) {
  const RateFunction& r = cfg.rate;
  const double tau = rip_rate(r.d, r.n, r.d, 1.0);
  return cfg.c_v * (r(r.d) * tau + std::sqrt(double(r.d) / r.n));
}

EigenvalueEstimate eigenvalue_estimator(const MeasurementBatch& second, const HermitianMatrix& pilot,
                                        const NuclearSetConfig& cfg) {
  if (pilot.dim() != second.dim())
    throw std::invalid_argument("eigenvalue_estimator: pilot and batch dimensions differ");
  const RVec resid = second.y - apply_sampling(second.plan, pilot);
  const HermitianMatrix prime = pilot + adjoint_average(second.plan, resid);
  EigenvalueEstimate est;
  est.lambdas = eigh(prime).eigenvalues.cwiseMax(0.0);
  est.v_n = eigen_deviation_scale(cfg);
  est.source_id = second.id();
  return est;
}

int select_k_hat(const HermitianMatrix& pilot, const EigenvalueEstimate& est,
                 const RateFunction& rate) {
  const int d = pilot.dim();
  const SpectralDecomposition sd = eigh(pilot);
  // Frobenius error of the best rank-k witness: the |λ|-sorted tail.
  std::vector<double> mags(d);
  for (int i = 0; i < d; ++i) mags[i] = std::abs(sd.eigenvalues[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  std::vector<double> tail(d + 1, 0.0);
  for (int k = d - 1; k >= 0; --k) tail[k] = tail[k + 1] + mags[k] * mags[k];
  const double step = 2.0 * std::sqrt(double(d) / rate.n);
  const double slack = tol::kState * std::max(1.0, std::sqrt(tail[0]));
  double mass = 0.0;
  for (int k = 1; k < d; ++k) {
    mass += est.lambdas[k - 1];
    if (std::sqrt(tail[k]) <= rate(k) + slack && 1.0 - mass <= k * step + slack) return k;
  }
  return d;
}

ConfidenceReport nuclear_confidence_set(const HermitianMatrix& pilot, const EigenvalueEstimate& est,
                                        const NuclearSetConfig& cfg, double alpha) {
  if (!(cfg.C > 0.0 && cfg.c_v > 0.0))
    throw std::invalid_argument("nuclear_confidence_set: C and c_v must be positive");
  const int d = pilot.dim();
  const int k = select_k_hat(pilot, est, cfg.rate);
  ConfidenceReport r;
  r.center = project_rank_k_state_space(pilot, std::min(2 * k, d)).matrix();
  const double radius = cfg.C * std::sqrt(double(k)) * cfg.rate(k);
  r.radius_sq = radius * radius;
  r.norm_kind = NormKind::Nuclear;
  r.level_alpha = alpha;
  r.method = Method::NuclearS1;
  r.statistic_value = est.lambdas.head(k).sum();
  r.n = cfg.rate.n;
  r.d = d;
  r.k_hat = k;
  const double regime = k * std::sqrt(d * std::log(double(std::max(d, 2))) / cfg.rate.n);
  if (regime > cfg.regime_threshold) {
    std::ostringstream msg;
    msg << "k_hat*sqrt(d log d / n) = " << regime << " exceeds " << cfg.regime_threshold
        << "; the low-rank consistency regime may not hold";
    r.warnings.push_back(msg.str());
  }
  return r;
}

NuclearRun nuclear_pipeline(const MeasurementBatch& first, const MeasurementBatch& second,
                            const NuclearSetConfig& cfg, const PilotConfig& pilot_cfg,
                            double alpha) {
  if (first.id() == second.id())
    throw std::invalid_argument(
        "nuclear_pipeline: pilot and eigenvalue samples must be independent batches");
  NuclearRun run;
  run.pilot = pilot_estimate(first, pilot_cfg);
  run.eigen = eigenvalue_estimator(second, run.pilot, cfg);
  run.report = nuclear_confidence_set(run.pilot, run.eigen, cfg, alpha);
  return run;
}

}  // namespace lowrank_uq
