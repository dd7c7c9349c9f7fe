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

#include "lowrank_uq/certify.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "lowrank_uq/sensing.hpp"

namespace lowrank_uq {

int epoch_horizon(int d, double epsilon, int margin) {
  return static_cast<int>(std::ceil(std::log2(d / epsilon))) + margin;
}

void validate(const CertificateConfig& cfg) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
    throw std::invalid_argument("certificate: epsilon must lie in (0, 1)");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw std::invalid_argument("certificate: delta must lie in (0, 1)");
  if (cfg.T_max < 0 || cfg.T_margin < 0)
    throw std::invalid_argument("certificate: T_max and T_margin must be non-negative");
  if (cfg.ensemble.dim() < 1) throw std::invalid_argument("certificate: ensemble not set");
  if (cfg.noise.kind() == NoiseModel::Kind::BernoulliPauli && !cfg.ensemble.is_pauli())
    throw std::invalid_argument("certificate: Bernoulli noise needs the Pauli design");
  if (cfg.isotropic_ustat && cfg.ensemble.is_pauli())
    throw std::invalid_argument("certificate: the U-statistic stopping rule needs Gaussian design");
}

namespace {

struct NoiseHandling {
  double sigma = 0.0;  // σ, or the bound √v
  bool subtract = true;
  bool bernoulli = false;
  bool paired = false;
};

NoiseHandling noise_handling(const CertificateConfig& cfg, int n) {
  NoiseHandling h;
  if (cfg.noise.kind() == NoiseModel::Kind::Gaussian) {
    h.sigma = cfg.noise.sigma();
    return h;
  }
  // Bernoulli: σ² ≤ d/T. With T ≥ n the σ² centering is negligible and
  // dropped; otherwise the paired statistic removes it.
  h.sigma = std::sqrt(cfg.noise.variance_bound(cfg.ensemble.dim()));
  h.subtract = false;
  h.bernoulli = true;
  h.paired = cfg.noise.preparations() < n;
  return h;
}

MeasurementBatch acquire(const MeasurementOracle& oracle, const SensingPlan& plan,
                         std::unordered_set<std::uint64_t>& seen) {
  MeasurementBatch b = oracle(plan);
  if (b.id() != plan.id() || b.n() != plan.n())
    throw std::logic_error("certificate: oracle returned a batch for a different plan");
  if (!seen.insert(b.id()).second)
    throw std::logic_error("certificate: a measurement batch was reused across steps");
  return b;
}

}  // namespace

Certificate run_certificate(const MeasurementOracle& oracle, const CertificateConfig& cfg, Rng& rng) {
  validate(cfg);
  const DesignEnsemble& ens = cfg.ensemble;
  const int d = ens.dim();
  const int d2 = d * d;

  Certificate cert;
  cert.epsilon = cfg.epsilon;
  cert.delta = cfg.delta;
  cert.T = epoch_horizon(d, cfg.epsilon, cfg.T_margin);
  cert.alpha = cfg.delta / (3.0 * cert.T);
  const int cap = cfg.T_max > 0 ? cfg.T_max : cert.T;
  if (cap > 28) throw std::invalid_argument("certificate: epoch cap beyond 2^29 measurements");
  cert.theta_hat = QuantumState::maximally_mixed(d);

  std::unordered_set<std::uint64_t> seen;
  for (int m = 1; m <= cap; ++m) {
    const int half = 1 << m;
    const MeasurementBatch first = acquire(oracle, draw_plan(ens, half, rng), seen);
    const QuantumState tilde = pilot_to_state(pilot_estimate(first, cfg.pilot));
    const NoiseHandling nh = noise_handling(cfg, half);

    ConfidenceReport report;
    if (ens.is_pauli() && half >= d2) {
      const MeasurementBatch second = acquire(oracle, full_basis_plan(ens, half / d2), seen);
      report = reavg_confidence_set(second, tilde.matrix(), nh.sigma, cert.alpha, nh.subtract);
    } else if (cfg.isotropic_ustat && half >= d2) {
      const MeasurementBatch second = acquire(oracle, draw_plan(ens, half, rng), seen);
      const double v = nh.sigma * nh.sigma;
      const UStatConstants c = cfg.conf_constants == ConstantsRegime::Theory
                                   ? UStatConstants::from_level(cert.alpha, v, d, half)
                                   : UStatConstants::simulation(cfg.ustat_C, cfg.ustat_C_prime);
      report = ustat_confidence_set(second, tilde.matrix(), cert.alpha, c);
    } else {
      const SensingPlan plan = nh.paired ? paired_plan(ens, half / 2, rng) : draw_plan(ens, half, rng);
      const MeasurementBatch second = acquire(oracle, plan, seen);
      RssOptions opts;
      opts.mode = cfg.rss_mode;
      opts.regime = cfg.conf_constants;
      opts.z = ens.is_pauli() ? pauli_z_constant(cert.alpha, ens.coherence()) : 0.0;
      opts.bernoulli = nh.bernoulli;
      opts.subtract_noise = nh.subtract;
      opts.paired = nh.paired;
      opts.table_C = cfg.table_C;
      opts.table_C_prime = cfg.table_C_prime;
      report = rss_confidence_set(second, tilde.matrix(), nh.sigma, cert.alpha, opts);
    }

    EpochRecord rec;
    rec.m = m;
    rec.budget = 2 * half;
    rec.method = report.method;
    rec.statistic = report.statistic_value;
    rec.radius_sq = report.radius_sq;
    rec.radius = report.radius();
    cert.epoch_log.push_back(rec);
    cert.n_hat += rec.budget;
    cert.theta_hat = tilde;
    if (rec.radius <= cfg.epsilon) {
      cert.stopped = true;
      break;
    }
  }
  return cert;
}

Certificate run_certificate(const QuantumState& theta, const CertificateConfig& cfg, Rng& rng) {
  if (theta.dim() != cfg.ensemble.dim())
    throw std::invalid_argument("certificate: state and design dimensions differ");
  const MeasurementOracle oracle = [&](const SensingPlan& plan) {
    return measure(plan, theta, cfg.noise, rng);
  };
  return run_certificate(oracle, cfg, rng);
}

void write_epoch_log_csv(std::ostream& os, const Certificate& cert, bool header) {
  if (header) os << "m,budget,method,statistic,radius_sq,radius\n";
  for (const EpochRecord& r : cert.epoch_log)
    os << r.m << ',' << r.budget << ',' << to_string(r.method) << ',' << format_double(r.statistic)
       << ',' << format_double(r.radius_sq) << ',' << format_double(r.radius) << '\n';
}

}  // namespace lowrank_uq
