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

#include "lowrank_uq/uq_frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lowrank_uq/sensing.hpp"

namespace lowrank_uq {

namespace {

void check_center(const MeasurementBatch& batch, const HermitianMatrix& center, const char* who) {
  if (center.dim() != batch.dim()) {
    std::ostringstream msg;
    msg << who << ": center is " << center.dim() << "x" << center.dim() << ", batch has d = "
        << batch.dim();
    throw std::invalid_argument(msg.str());
  }
}

void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument(std::string(who) + ": alpha must lie in (0, 1)");
}

ConfidenceReport make_report(const HermitianMatrix& center, double radius_sq, double alpha,
                             Method method, double stat, int n) {
  ConfidenceReport r;
  r.center = center;
  r.radius_sq = std::max(radius_sq, 0.0);
  r.norm_kind = NormKind::Frobenius;
  r.level_alpha = alpha;
  r.method = method;
  r.statistic_value = stat;
  r.n = n;
  r.d = center.dim();
  return r;
}

}  // namespace

double rss_statistic(const MeasurementBatch& batch, const HermitianMatrix& center, double sigma) {
  check_center(batch, center, "rss_statistic");
  const RVec r = batch.y - apply_sampling(batch.plan, center);
  return r.squaredNorm() / batch.n() - sigma * sigma;
}

double paired_rss_statistic(const MeasurementBatch& batch, const HermitianMatrix& center) {
  check_center(batch, center, "paired_rss_statistic");
  const int n = batch.n();
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("paired_rss_statistic: n must be even");
  const int half = n / 2;
  const SensingPlan& plan = batch.plan;
  const int d2 = plan.dim() * plan.dim();
  for (int i = 0; i < half; ++i) {
    const bool same =
        plan.ensemble().is_pauli()
            ? plan.index(i) == plan.index(i + half)
            : std::equal(plan.gaussian_draw(i), plan.gaussian_draw(i) + d2,
                         plan.gaussian_draw(i + half));
    if (!same) {
      std::ostringstream msg;
      msg << "paired_rss_statistic: draw " << i << " and draw " << i + half
          << " do not share a design";
      throw std::invalid_argument(msg.str());
    }
  }
  const RVec fit = apply_sampling(plan, center);
  const RVec r = batch.y - fit;
  return 2.0 * r.head(half).dot(r.tail(half)) / n;
}

double ustat_statistic(const MeasurementBatch& batch, const HermitianMatrix& center) {
  check_center(batch, center, "ustat_statistic");
  const int n = batch.n();
  if (n < 2) throw std::invalid_argument("ustat_statistic: needs n >= 2");
  // Σ_{i<j}⟨a_i, a_j⟩ = (‖Σa_i‖² − Σ‖a_i‖²)/2 with a_i = Y_iX^i − c.
  const CMat sum = weighted_design_sum(batch.plan, batch.y) - double(n) * center.mat();
  const RVec norms = design_sq_norms(batch.plan);
  const RVec fit = apply_sampling(batch.plan, center);
  const double c2 = center.mat().squaredNorm();
  double diag = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = batch.y[i];
    diag += y * y * norms[i] - 2.0 * y * fit[i] + c2;
  }
  return (sum.squaredNorm() - diag) / (double(n) * (n - 1));
}

double reavg_statistic(const MeasurementBatch& batch, const HermitianMatrix& center, double sigma,
                       bool subtract_noise) {
  check_center(batch, center, "reavg_statistic");
  const SensingPlan& plan = batch.plan;
  if (!plan.ensemble().is_pauli())
    throw std::invalid_argument("reavg_statistic: needs a Pauli basis design");
  const int d = plan.dim();
  const int d2 = d * d;
  const int n = batch.n();
  if (n % d2 != 0) {
    std::ostringstream msg;
    msg << "reavg_statistic: n = " << n << " is not a multiple of d^2 = " << d2;
    throw std::invalid_argument(msg.str());
  }
  const int m = n / d2;
  std::vector<int> count(d2, 0);
  std::vector<double> sum(d2, 0.0);
  for (int i = 0; i < n; ++i) {
    ++count[plan.index(i)];
    sum[plan.index(i)] += batch.y[i];
  }
  for (int k = 0; k < d2; ++k) {
    if (count[k] != m) {
      std::ostringstream msg;
      msg << "reavg_statistic: basis index " << k << " measured " << count[k]
          << " times, expected " << m;
      throw std::invalid_argument(msg.str());
    }
  }
  const std::vector<double> coef = plan.ensemble().basis().coefficients(center);
  const double sm = std::sqrt(double(m));
  const double sn = std::sqrt(double(n));
  double ss = 0.0;
  for (int k = 0; k < d2; ++k) {
    const double zt = sum[k] / sm - sn * coef[k];
    ss += zt * zt;
  }
  double r = ss / n;
  if (subtract_noise) r -= sigma * sigma * d2 / n;
  return r;
}

double largest_sqrt_root(double a, double b) {
  // u² − b u − a = 0 with u = √x.
  const double disc = b * b + 4.0 * a;
  if (disc < 0.0) return 0.0;
  const double u = 0.5 * (b + std::sqrt(disc));
  return u > 0.0 ? u * u : 0.0;
}

double rss_table_radius(double r_hat, int n, double C, double C_prime) {
  const double r = std::max(r_hat, 0.0);
  const double sn = std::sqrt(double(n));
  return std::sqrt(r + C / sn + C_prime * std::sqrt(r) / sn);
}

double rss_radius_sq(double stat, int n, int d, double sigma, double alpha, const RssOptions& opts) {
  check_alpha(alpha, "rss_confidence_set");
  if (n < 1) throw std::invalid_argument("rss_confidence_set: n must be positive");
  if (opts.regime == ConstantsRegime::Simulation) {
    const double r = rss_table_radius(stat, n, opts.table_C, opts.table_C_prime);
    return r * r;
  }
  const double sn = std::sqrt(double(n));
  double xi, zbar_mult;
  if (opts.bernoulli) {
    // Chebyshev: P(· > t) ≤ Var/t² at level α/3.
    xi = std::sqrt(3.0 / alpha);
    zbar_mult = 3.0 / alpha;
  } else {
    xi = xi_quantile(alpha / 3.0, sigma, n);
    zbar_mult = z_alpha(alpha / 3.0);
  }
  const double A = 2.0 * (stat + opts.z * d / n + xi / sn);
  const double B = 2.0 * sigma * std::sqrt(zbar_mult) / sn;
  const double c = 4.0 * opts.z * d / n;
  if (opts.mode == RssMode::ShapeConstrained)
    return std::max(A + B * std::sqrt(std::max(12.0, c)), 0.0);
  // x = A + B√max(3x, c): try both branches, keep the largest admissible root.
  double best = 0.0;
  const double x1 = largest_sqrt_root(A, B * std::sqrt(3.0));
  if (x1 > 0.0 && 3.0 * x1 >= c) best = std::max(best, x1);
  const double x2 = A + B * std::sqrt(c);
  if (x2 > 0.0 && 3.0 * x2 <= c) best = std::max(best, x2);
  return best;
}

ConfidenceReport rss_confidence_set(const MeasurementBatch& batch, const HermitianMatrix& center,
                                    double sigma, double alpha, const RssOptions& opts) {
  double stat;
  int n_eff = batch.n();
  if (opts.paired) {
    stat = paired_rss_statistic(batch, center);
    n_eff = batch.n() / 2;
  } else {
    stat = rss_statistic(batch, center, opts.subtract_noise ? sigma : 0.0);
  }
  const double radius_sq = rss_radius_sq(stat, n_eff, batch.dim(), sigma, alpha, opts);
  return make_report(center, radius_sq, alpha, opts.paired ? Method::PairedRSS : Method::RSS, stat,
                     batch.n());
}

UStatConstants UStatConstants::theory(double C1, double C2) {
  UStatConstants c;
  c.regime = ConstantsRegime::Theory;
  c.C1 = C1;
  c.C2 = C2;
  return c;
}

UStatConstants UStatConstants::simulation(double C, double C_prime) {
  UStatConstants c;
  c.regime = ConstantsRegime::Simulation;
  c.C = C;
  c.C_prime = C_prime;
  return c;
}

UStatConstants UStatConstants::from_level(double alpha, double v, int d, int n, double M) {
  check_alpha(alpha, "UStatConstants::from_level");
  if (n < 2) throw std::invalid_argument("UStatConstants::from_level: needs n >= 2");
  const double m2 = M * M;
  const double C1 = 2.0 * std::sqrt(2.0 * (3.0 * m2 + v) / alpha);
  const double C2 = 2.0 * std::sqrt(2.0 / alpha) * (m2 + v) * std::sqrt(1.0 + 3.0 / (double(d) * d)) *
                    std::sqrt(double(n) / (n - 1));
  return theory(C1, C2);
}

double ustat_radius_sq(double stat, int n, int d, const UStatConstants& c) {
  const double sn = std::sqrt(double(n));
  if (c.regime == ConstantsRegime::Simulation) {
    const double r = std::max(stat, 0.0);
    return r + c.C * d / n + c.C_prime * std::sqrt(r) / sn;
  }
  return largest_sqrt_root(std::max(stat, 0.0) + c.C2 * d / n, c.C1 / sn);
}

ConfidenceReport ustat_confidence_set(const MeasurementBatch& batch, const HermitianMatrix& center,
                                      double alpha, const UStatConstants& c) {
  check_alpha(alpha, "ustat_confidence_set");
  const double stat = ustat_statistic(batch, center);
  return make_report(center, ustat_radius_sq(stat, batch.n(), batch.dim(), c), alpha,
                     Method::UStat, stat, batch.n());
}

double reavg_radius_sq(double stat, int n, int d, double sigma, double alpha) {
  check_alpha(alpha, "reavg_confidence_set");
  const double z = normal_upper_quantile(alpha / 2.0);
  const double xi = xi_quantile(alpha / 2.0, sigma, d * d);
  return largest_sqrt_root(stat + xi * d / n, z * sigma / std::sqrt(double(n)));
}

ConfidenceReport reavg_confidence_set(const MeasurementBatch& batch, const HermitianMatrix& center,
                                      double sigma, double alpha, bool subtract_noise) {
  const double stat = reavg_statistic(batch, center, sigma, subtract_noise);
  return make_report(center, reavg_radius_sq(stat, batch.n(), batch.dim(), sigma, alpha),
                     alpha, Method::ReAvg, stat, batch.n());
}

}  // namespace lowrank_uq
