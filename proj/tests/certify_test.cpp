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
#include <sstream>
#include <stdexcept>

#include "lowrank_uq/certify.hpp"
#include "test_util.hpp"

using namespace lowrank_uq;

namespace {

CertificateConfig pauli_config(int d, double sigma) {
  CertificateConfig cfg;
  cfg.ensemble = DesignEnsemble::pauli_for_dim(d);
  cfg.noise = NoiseModel::gaussian(sigma);
  cfg.conf_constants = ConstantsRegime::Simulation;
  return cfg;
}

}  // namespace

TEST(Certificate, Horizon) {
  EXPECT_EQ(epoch_horizon(4, 0.5, 2), 5);
  EXPECT_EQ(epoch_horizon(8, 0.5, 2), 6);
  EXPECT_EQ(epoch_horizon(8, 0.3, 0), 5);
}

TEST(Certificate, ValidateRejectsBadLevels) {
  CertificateConfig cfg = pauli_config(4, 0.05);
  cfg.epsilon = 1.0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg.epsilon = 0.5;
  cfg.delta = 0.0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg.delta = 0.1;
  cfg.ensemble = DesignEnsemble::gaussian(4);
  cfg.noise = NoiseModel::bernoulli(10);
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg.noise = NoiseModel::gaussian(0.1);
  EXPECT_NO_THROW(validate(cfg));
}

TEST(Certificate, BudgetIdentity) {
  Rng rng(301);
  const auto theta = random_rank_k_state(4, 1, rng);
  const CertificateConfig cfg = pauli_config(4, 0.05);
  const Certificate cert = run_certificate(theta, cfg, rng);
  ASSERT_FALSE(cert.epoch_log.empty());
  int total = 0;
  for (std::size_t i = 0; i < cert.epoch_log.size(); ++i) {
    const EpochRecord& e = cert.epoch_log[i];
    EXPECT_EQ(e.m, int(i) + 1);
    EXPECT_EQ(e.budget, 1 << (e.m + 1));
    EXPECT_NEAR(e.radius * e.radius, e.radius_sq, 1e-12 * std::max(1.0, e.radius_sq));
    total += e.budget;
  }
  const int m_hat = cert.epoch_log.back().m;
  EXPECT_EQ(cert.n_hat, total);
  EXPECT_EQ(cert.n_hat, (1 << (m_hat + 2)) - 4);
  EXPECT_EQ(cert.T, 5);
  EXPECT_DOUBLE_EQ(cert.alpha, 0.1 / 15.0);
}

TEST(Certificate, StopsWithinEpsilonAtLowNoise) {
  Rng rng(302);
  const auto theta = random_rank_k_state(4, 1, rng);
  const Certificate cert = run_certificate(theta, pauli_config(4, 0.01), rng);
  EXPECT_TRUE(cert.stopped);
  EXPECT_LE(cert.epoch_log.back().radius, 0.5);
  EXPECT_LE(frobenius_norm(cert.theta_hat.matrix() - theta.matrix()), 0.5);
  for (std::size_t i = 0; i + 1 < cert.epoch_log.size(); ++i)
    EXPECT_GT(cert.epoch_log[i].radius, 0.5);
}

TEST(Certificate, EpochCapWithoutStop) {
  Rng rng(303);
  const auto theta = random_rank_k_state(4, 1, rng);
  CertificateConfig cfg = pauli_config(4, 5.0);
  cfg.T_max = 2;
  const Certificate cert = run_certificate(theta, cfg, rng);
  EXPECT_FALSE(cert.stopped);
  EXPECT_EQ(cert.epoch_log.size(), 2u);
  EXPECT_EQ(cert.n_hat, 4 + 8);
}

TEST(Certificate, LiveOracleSeesFreshPlans) {
  Rng truth_rng(304);
  const auto theta = random_rank_k_state(4, 2, truth_rng);
  const CertificateConfig cfg = pauli_config(4, 0.05);
  int calls = 0;
  long measured = 0;
  Rng noise_rng(305);
  const MeasurementOracle oracle = [&](const SensingPlan& plan) {
    ++calls;
    measured += plan.n();
    return measure_gaussian(plan, theta.matrix(), 0.05, noise_rng);
  };
  Rng rng(306);
  const Certificate cert = run_certificate(oracle, cfg, rng);
  EXPECT_EQ(calls, 2 * static_cast<int>(cert.epoch_log.size()));
  EXPECT_EQ(measured, cert.n_hat);
}

TEST(Certificate, RejectsReusedBatch) {
  Rng rng(307);
  const auto theta = random_rank_k_state(4, 1, rng);
  CertificateConfig cfg = pauli_config(4, 1.0);
  std::optional<MeasurementBatch> cached;
  const MeasurementOracle stale = [&](const SensingPlan& plan) {
    if (!cached) cached = measure_gaussian(plan, theta.matrix(), 1.0, rng);
    return *cached;
  };
  EXPECT_THROW(run_certificate(stale, cfg, rng), std::logic_error);
}

TEST(Certificate, ReaveragingAfterSwitch) {
  Rng rng(308);
  const auto theta = random_rank_k_state(4, 1, rng);
  CertificateConfig cfg = pauli_config(4, 1.0);
  cfg.T_max = 5;
  const Certificate cert = run_certificate(theta, cfg, rng);
  for (const EpochRecord& e : cert.epoch_log)
    EXPECT_EQ(e.method, (1 << e.m) >= 16 ? Method::ReAvg : Method::RSS) << "epoch " << e.m;
}

TEST(Certificate, BernoulliNoiseRuns) {
  Rng rng(309);
  const auto theta = random_rank_k_state(4, 1, rng);
  CertificateConfig cfg = pauli_config(4, 0.0);
  cfg.noise = NoiseModel::bernoulli(4);
  cfg.T_max = 3;
  const Certificate cert = run_certificate(theta, cfg, rng);
  // T = 4 < 2^m from m = 3 on: the duplicated-design statistic takes over.
  EXPECT_EQ(cert.epoch_log.back().method, Method::PairedRSS);
  EXPECT_EQ(cert.epoch_log.front().method, Method::RSS);
}

TEST(Certificate, DeterministicUnderSeed) {
  auto run = [] {
    Rng rng(310);
    const auto theta = random_rank_k_state(8, 2, rng);
    std::ostringstream os;
    write_epoch_log_csv(os, run_certificate(theta, pauli_config(8, 0.05), rng));
    return os.str();
  };
  const std::string a = run();
  EXPECT_EQ(a, run());
  EXPECT_EQ(a.rfind("m,budget,method,statistic,radius_sq,radius\n", 0), 0u);
}
