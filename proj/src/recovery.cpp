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

#include "lowrank_uq/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "lowrank_uq/sensing.hpp"
#include "lowrank_uq/tolerances.hpp"

namespace lowrank_uq {

double RateFunction::operator()(int k) const {
  return 2.0 * sigma * std::sqrt(D * k * d / static_cast<double>(n));
}

double noise_scale(const MeasurementBatch& batch) {
  if (batch.noise.kind() == NoiseModel::Kind::BernoulliPauli)
    return std::sqrt(batch.noise.variance_bound(batch.dim()));
  return batch.noise.sigma();
}

namespace {

HermitianMatrix drop_imaginary(const HermitianMatrix& a) {
  return HermitianMatrix::hermitize(a.mat().real().cast<cplx>());
}

HermitianMatrix gram_apply(const SensingPlan& plan, const HermitianMatrix& m) {
  HermitianMatrix out = adjoint_average(plan, apply_sampling(plan, m));
  return plan.ensemble().is_pauli() ? out : drop_imaginary(out);
}

}  // namespace

double sampling_lipschitz(const SensingPlan& plan, int iters) {
  const int d = plan.dim();
  const bool real = !plan.ensemble().is_pauli();
  // Deterministic start with generic overlap with every eigenspace.
  Rng rng(0x5eed);
  NormalSampler normal;
  CMat g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = cplx(normal(rng), real ? 0.0 : normal(rng));
  HermitianMatrix v = HermitianMatrix::hermitize(g);
  v *= 1.0 / frobenius_norm(v);
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    HermitianMatrix w = gram_apply(plan, v);
    lambda = frobenius_norm(w);
    if (lambda == 0.0) return 0.0;
    v = w * (1.0 / lambda);
  }
  return lambda;
}

double pilot_objective(const MeasurementBatch& batch, const HermitianMatrix& theta, double lambda) {
  const RVec r = batch.y - apply_sampling(batch.plan, theta);
  const double fit = 0.5 * r.squaredNorm() / batch.n();
  return lambda > 0.0 ? fit + lambda * nuclear_norm(theta) : fit;
}

HermitianMatrix soft_threshold_spectrum(const HermitianMatrix& a, double t) {
  if (t <= 0.0) return a;
  const SpectralDecomposition sd = eigh(a);
  RVec shrunk = sd.eigenvalues;
  for (auto& l : shrunk) l = std::copysign(std::max(std::abs(l) - t, 0.0), l);
  const CMat& v = sd.eigenvectors;
  return HermitianMatrix::hermitize(v * shrunk.cast<cplx>().asDiagonal() * v.adjoint());
}

PilotResult solve_pilot(const MeasurementBatch& batch, const PilotConfig& cfg) {
  if (batch.n() < 1) throw std::invalid_argument("pilot_estimate: empty batch");
  if (cfg.max_iters < 1 || cfg.grad_tol < 0.0)
    throw std::invalid_argument("pilot_estimate: invalid configuration");
  const SensingPlan& plan = batch.plan;
  const bool real = !plan.ensemble().is_pauli();
  const int d = batch.dim();

  PilotResult res;
  res.lambda = cfg.lambda_scale * noise_scale(batch) * std::sqrt(double(d) / batch.n());
  // Small safety margin: power iteration approaches L from below.
  res.lipschitz = 1.02 * sampling_lipschitz(plan, cfg.power_iters);
  res.estimate = HermitianMatrix::zero(d);
  if (res.lipschitz == 0.0) {
    res.converged = true;
    return res;
  }
  const double step = 1.0 / res.lipschitz;

  HermitianMatrix theta = HermitianMatrix::zero(d);
  RVec fitted = RVec::Zero(batch.n());
  double obj = pilot_objective(batch, theta, res.lambda);
  int increases = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const HermitianMatrix grad = adjoint_average(plan, fitted - batch.y);
    HermitianMatrix next = soft_threshold_spectrum(theta - step * grad, step * res.lambda);
    if (real) next = drop_imaginary(next);
    fitted = apply_sampling(plan, next);
    const double next_obj =
        0.5 * (batch.y - fitted).squaredNorm() / batch.n() +
        (res.lambda > 0.0 ? res.lambda * nuclear_norm(next) : 0.0);
    increases = next_obj > obj ? increases + 1 : 0;
    if (increases >= 10) {
      std::ostringstream msg;
      msg << "pilot_estimate: objective increased on 10 consecutive steps (iteration " << it
          << ", objective " << next_obj << ")";
      throw SolverError(msg.str());
    }
    const double move = frobenius_norm(next - theta) * res.lipschitz;
    theta = std::move(next);
    obj = next_obj;
    res.iterations = it;
    if (move <= cfg.grad_tol) {
      res.converged = true;
      break;
    }
  }
  res.estimate = theta;
  res.objective = obj;
  return res;
}

HermitianMatrix pilot_estimate(const MeasurementBatch& batch, const PilotConfig& cfg) {
  return solve_pilot(batch, cfg).estimate;
}

std::pair<HermitianMatrix, int> rank_reduce(const HermitianMatrix& pilot, const RateFunction& rate) {
  const int d = pilot.dim();
  const SpectralDecomposition sd = eigh(pilot);
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(sd.eigenvalues[i]) > std::abs(sd.eigenvalues[j]);
  });
  // tail[k] = Frobenius error of the best rank-k truncation.
  std::vector<double> tail(d + 1, 0.0);
  for (int k = d - 1; k >= 0; --k) {
    const double l = sd.eigenvalues[order[k]];
    tail[k] = tail[k + 1] + l * l;
  }
  // Rounding noise in the spectrum must not count as a tail.
  const double slack = tol::kState * std::max(1.0, std::sqrt(tail[0]));
  for (int k = 1; k <= d; ++k) {
    if (std::sqrt(tail[k]) <= rate(k) / 2.0 + slack || k == d) return {best_rank_k(pilot, k), k};
  }
  return {pilot, d};
}

QuantumState pilot_to_state(const HermitianMatrix& pilot) { return project_state_space(pilot); }

}  // namespace lowrank_uq
