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

#include <gtest/gtest.h>

#include <cmath>

#include "lowrank_uq/uq_nuclear.hpp"
#include "test_util.hpp"

using namespace lowrank_uq;

namespace {

NuclearSetConfig config(double sigma, int d, int n, double D = 1.0) {
  NuclearSetConfig cfg;
  cfg.rate = RateFunction{D, sigma, d, n};
  return cfg;
}

EigenvalueEstimate spectrum_of(const HermitianMatrix& a) {
  EigenvalueEstimate e;
  e.lambdas = eigh(a).eigenvalues.cwiseMax(0.0);
  return e;
}

}  // namespace

TEST(Eigenvalues, ParsevalFromZeroPilot) {
  Rng rng(51);
  const auto ens = DesignEnsemble::pauli(3);
  const auto theta = random_rank_k_state(8, 3, rng);
  const MeasurementBatch b = measure_gaussian(full_basis_plan(ens, 1), theta.matrix(), 0.0, rng);
  const auto est = eigenvalue_estimator(b, HermitianMatrix::zero(8), config(0.0, 8, 64));
  const RVec truth = eigh(theta.matrix()).eigenvalues;
  EXPECT_LT((est.lambdas - truth.cwiseMax(0.0)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(est.source_id, b.id());
}

TEST(Eigenvalues, ExactPilotNoNoise) {
  Rng rng(52);
  const auto theta = random_rank_k_state(4, 2, rng);
  const MeasurementBatch b =
      measure_gaussian(draw_plan(DesignEnsemble::pauli(2), 30, rng), theta.matrix(), 0.0, rng);
  const auto est = eigenvalue_estimator(b, theta.matrix(), config(0.0, 4, 30));
  EXPECT_LT((est.lambdas - eigh(theta.matrix()).eigenvalues.cwiseMax(0.0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Eigenvalues, DeviationScale) {
  NuclearSetConfig cfg = config(0.5, 16, 4096, 2.0);
  cfg.c_v = 3.0;
  const double r_d = 2 * 0.5 * std::sqrt(2.0 * 16 * 16 / 4096);
  const double tau = std::sqrt(16.0 * 16 * std::log(16.0) / 4096);
  EXPECT_NEAR(eigen_deviation_scale(cfg), 3.0 * (r_d * tau + std::sqrt(16.0 / 4096)), 1e-14);
}

TEST(KHat, PureState) {
  Rng rng(53);
  const auto pure = random_rank_k_state(8, 1, rng);
  EXPECT_EQ(select_k_hat(pure.matrix(), spectrum_of(pure.matrix()), RateFunction{1, 0.1, 8, 1000}), 1);
}

TEST(KHat, MixedForcesFullRank) {
  // 1 − k/d ≤ 2k√(d/n) fails for k < d when n is large.
  const int d = 4;
  const HermitianMatrix mixed = QuantumState::maximally_mixed(d).matrix();
  EXPECT_EQ(select_k_hat(mixed, spectrum_of(mixed), RateFunction{1, 1e-9, d, 1000000}), d);
}

TEST(KHat, LooseRateRankOne) {
  Rng rng(54);
  const HermitianMatrix pilot = lowrank_uq::testing::random_hermitian(6, rng) * 0.1;
  EigenvalueEstimate e;
  e.lambdas = RVec::Zero(6);
  e.lambdas[0] = 1.0;
  EXPECT_EQ(select_k_hat(pilot, e, RateFunction{1e4, 1.0, 6, 100}), 1);
}

TEST(NuclearSet, ExactPureState) {
  Rng rng(55);
  const auto pure = random_rank_k_state(4, 1, rng);
  const auto r = nuclear_confidence_set(pure.matrix(), spectrum_of(pure.matrix()), config(0.0, 4, 100));
  EXPECT_EQ(r.radius_sq, 0.0);
  EXPECT_EQ(*r.k_hat, 1);
  EXPECT_EQ(r.norm_kind, NormKind::Nuclear);
  EXPECT_LT(frobenius_norm(r.center - pure.matrix()), 1e-10);
  EXPECT_LT(r.distance(pure.matrix()), 1e-10);
}

TEST(NuclearSet, RadiusMonotoneInK) {
  const NuclearSetConfig cfg = config(0.3, 16, 2000, 2.0);
  for (int k = 1; k < 16; ++k)
    EXPECT_LE(cfg.C * std::sqrt(k) * cfg.rate(k), cfg.C * std::sqrt(k + 1.0) * cfg.rate(k + 1));
}

TEST(NuclearSet, CenterCloseToPilot) {
  const int d = 8, n = 2048;
  const auto ens = DesignEnsemble::pauli(3);
  for (int rep = 0; rep < 20; ++rep) {
    Rng rng(derive_seed(56, {std::uint64_t(rep)}));
    const auto theta = random_rank_k_state(d, 2, rng);
    const auto b1 = measure_gaussian(draw_plan(ens, n, rng), theta.matrix(), 0.5, rng);
    const auto b2 = measure_gaussian(draw_plan(ens, n, rng), theta.matrix(), 0.5, rng);
    const NuclearSetConfig cfg = config(0.5, d, n, 3.0);
    const NuclearRun run = nuclear_pipeline(b1, b2, cfg, PilotConfig{});
    const int k = *run.report.k_hat;
    EXPECT_LE(numerical_rank(run.report.center, 1e-9), std::min(2 * k, d));
    EXPECT_NEAR(run.report.center.trace().real(), 1.0, 1e-10);
    EXPECT_LE(frobenius_norm(run.pilot - run.report.center), cfg.rate(k) + 1e-12) << rep;
  }
}

TEST(NuclearSet, SampleSplittingEnforced) {
  Rng rng(57);
  const auto theta = random_rank_k_state(4, 1, rng);
  const auto b = measure_gaussian(draw_plan(DesignEnsemble::pauli(2), 64, rng), theta.matrix(), 0.1, rng);
  EXPECT_THROW(nuclear_pipeline(b, b, config(0.1, 4, 64), PilotConfig{}), std::invalid_argument);
}

TEST(NuclearSet, RegimeWarning) {
  const HermitianMatrix mixed = QuantumState::maximally_mixed(8).matrix();
  const auto r = nuclear_confidence_set(mixed, spectrum_of(mixed), config(1.0, 8, 50));
  EXPECT_FALSE(r.warnings.empty());
  Rng rng(58);
  const auto pure = random_rank_k_state(8, 1, rng);
  EXPECT_TRUE(nuclear_confidence_set(pure.matrix(), spectrum_of(pure.matrix()), config(0.0, 8, 100000))
                  .warnings.empty());
}
