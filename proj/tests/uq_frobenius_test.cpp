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
#include <vector>

#include "lowrank_uq/uq_frobenius.hpp"
#include "test_util.hpp"

using namespace lowrank_uq;
using lowrank_uq::testing::naive_ustat;
using lowrank_uq::testing::xi_monte_carlo;

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class F>
Moments monte_carlo(int reps, F&& f) {
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double v = f(r);
    s += v;
    s2 += v * v;
  }
  Moments m;
  m.mean = s / reps;
  m.se = std::sqrt(std::max(s2 / reps - m.mean * m.mean, 0.0) / reps);
  return m;
}

double sq_dist(const HermitianMatrix& a, const HermitianMatrix& b) {
  return std::pow(frobenius_norm(a - b), 2);
}

}  // namespace

TEST(Quantiles, ClosedFormZero) {
  // P(χ²₂ > 2) = e^{−1}.
  EXPECT_NEAR(xi_quantile(std::exp(-1.0), 1.0, 2), 0.0, 1e-6);
  EXPECT_EQ(xi_quantile(0.05, 0.0, 10), 0.0);
  EXPECT_THROW(xi_quantile(0.0, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(xi_quantile(1.0, 1.0, 3), std::invalid_argument);
}

TEST(Quantiles, MatchesMonteCarlo) {
  Rng rng(31);
  EXPECT_NEAR(xi_quantile(0.05, 1.0, 1), 2.841, 0.01);
  EXPECT_NEAR(xi_quantile(0.05, 1.0, 1), xi_monte_carlo(0.05, 1.0, 1, 1, rng), 0.01);
  EXPECT_NEAR(xi_quantile(0.05, 1.0, 5), xi_monte_carlo(0.05, 1.0, 5, 1000000, rng), 0.02);
  EXPECT_NEAR(xi_quantile(0.5, 2.0, 10), xi_monte_carlo(0.5, 2.0, 10, 1000000, rng), 0.02);
}

TEST(Quantiles, NormalAndPauli) {
  EXPECT_NEAR(normal_upper_quantile(0.025), 1.959963984540054, 1e-12);
  EXPECT_NEAR(z_alpha(0.05), std::log(60.0), 0.0);
  EXPECT_NEAR(pauli_concentration(1.0), 3.0 / 56.0, 1e-15);
  EXPECT_NEAR(pauli_concentration(1.0), 0.05357, 1e-5);
  EXPECT_NEAR(pauli_z_constant(0.05, 1.0), 56.0 / 3.0 * std::log(120.0), 1e-12);
  EXPECT_NEAR(pauli_z_constant(0.05, 1.0), 89.37, 0.02);
  EXPECT_THROW(pauli_z_constant(6.0 / std::exp(1.0), 1.0), std::invalid_argument);
  // Coverage loss 2e^{−C z} equals alpha/3.
  EXPECT_NEAR(2.0 * std::exp(-pauli_concentration(1.0) * pauli_z_constant(0.1, 1.0)), 0.1 / 3, 1e-15);

  const auto q = QuantileConstants::for_rss(0.06, 1.0, 50, true);
  EXPECT_DOUBLE_EQ(q.z_alpha, std::log(150.0));
  EXPECT_DOUBLE_EQ(q.xi, xi_quantile(0.02, 1.0, 50));
  EXPECT_DOUBLE_EQ(q.z, pauli_z_constant(0.06, 1.0));
  EXPECT_EQ(QuantileConstants::for_rss(0.06, 1.0, 50, false).z, 0.0);
}

TEST(Rss, HandArithmetic) {
  // X = 2E_0 = √2·I, tr(Xc) = 1 for c = I/(2√2); Y = 2, σ = 1 → 1 − 1 = 0.
  const auto ens = DesignEnsemble::pauli(1);
  const SensingPlan plan = SensingPlan::from_indices(ens, {0}, 0);
  const MeasurementBatch b = make_batch(plan, RVec::Constant(1, 2.0), NoiseModel::gaussian(1.0));
  const HermitianMatrix c = HermitianMatrix::identity(2) * (1.0 / (2.0 * std::sqrt(2.0)));
  EXPECT_NEAR(rss_statistic(b, c, 1.0), 0.0, 1e-14);
}

TEST(Rss, NoiselessAtTruth) {
  Rng rng(32);
  for (auto ens : {DesignEnsemble::pauli(2), DesignEnsemble::gaussian(4)}) {
    const auto theta = random_rank_k_state(4, 2, rng, {!ens.is_pauli(), false});
    const MeasurementBatch b = measure_gaussian(draw_plan(ens, 40, rng), theta.matrix(), 0.0, rng);
    EXPECT_NEAR(rss_statistic(b, theta.matrix(), 0.0), 0.0, 1e-14);
  }
}

TEST(Rss, RadiusDegenerateAndModes) {
  RssOptions opts;
  // σ = 0, z = 0: radius² = 2r̂ in both modes.
  for (auto mode : {RssMode::ShapeConstrained, RssMode::ImplicitSolve}) {
    opts.mode = mode;
    EXPECT_DOUBLE_EQ(rss_radius_sq(3.5, 100, 8, 0.0, 0.05, opts), 7.0);
  }
  // Max attained at 4zd/n: z̄ no longer depends on v, so the modes agree.
  opts.z = 100.0;
  const int n = 10, d = 4;
  const double stat = -30.0;
  opts.mode = RssMode::ShapeConstrained;
  const double shape = rss_radius_sq(stat, n, d, 0.01, 0.05, opts);
  opts.mode = RssMode::ImplicitSolve;
  const double implicit = rss_radius_sq(stat, n, d, 0.01, 0.05, opts);
  ASSERT_LE(3.0 * implicit, 4.0 * opts.z * d / n);
  EXPECT_NEAR(shape, implicit, 1e-12);
  // Negative statistics give a clamped radius.
  opts.z = 0.0;
  EXPECT_EQ(rss_radius_sq(-5.0, 100, 8, 0.0, 0.05, opts), 0.0);
}

TEST(Rss, ImplicitSolvesEquation) {
  RssOptions opts;
  opts.mode = RssMode::ImplicitSolve;
  opts.z = 2.0;
  const int n = 60, d = 4;
  const double sigma = 0.7, alpha = 0.1, stat = 0.2;
  const double x = rss_radius_sq(stat, n, d, sigma, alpha, opts);
  const double zbar = std::sqrt(std::log(9.0 / alpha) * sigma * sigma *
                                std::max(3.0 * x, 4.0 * opts.z * d / n));
  const double rhs = 2.0 * (stat + opts.z * d / n + (zbar + xi_quantile(alpha / 3, sigma, n)) /
                                                        std::sqrt(double(n)));
  EXPECT_NEAR(x, rhs, 1e-10);
  // Largest root: beyond x every point violates the inequality.
  for (double t : {1.01, 1.5, 3.0}) {
    const double xt = t * x;
    const double zb = std::sqrt(std::log(9.0 / alpha) * sigma * sigma *
                                std::max(3.0 * xt, 4.0 * opts.z * d / n));
    EXPECT_GT(xt, 2.0 * (stat + opts.z * d / n +
                         (zb + xi_quantile(alpha / 3, sigma, n)) / std::sqrt(double(n))));
  }
}

TEST(Rss, TableRadius) {
  EXPECT_NEAR(rss_table_radius(0.0, 100), std::sqrt(0.1), 1e-15);
  EXPECT_EQ(rss_table_radius(-0.4, 100), rss_table_radius(0.0, 100));
  EXPECT_NEAR(rss_table_radius(0.1, 100), std::sqrt(0.1 + 0.1 + 0.6 * std::sqrt(0.1)), 1e-15);
}

TEST(Rss, SimulationRegimeUsesTable) {
  RssOptions opts;
  opts.regime = ConstantsRegime::Simulation;
  EXPECT_NEAR(rss_radius_sq(0.3, 200, 32, 1.0, 0.05, opts), std::pow(rss_table_radius(0.3, 200), 2),
              1e-14);
}

TEST(UStat, MatchesNaiveDoubleSum) {
  Rng rng(33);
  for (int t = 0; t < 60; ++t) {
    const bool pauli = t % 2 == 0;
    const int d = pauli ? (t % 4 == 0 ? 2 : 4) : 2 + t % 3;
    const int n = 2 + t % 19;
    const auto ens = pauli ? DesignEnsemble::pauli_for_dim(d) : DesignEnsemble::gaussian(d);
    const auto theta = random_rank_k_state(d, 1, rng, {!pauli, false});
    const MeasurementBatch b = measure_gaussian(draw_plan(ens, n, rng), theta.matrix(), 0.5, rng);
    const HermitianMatrix c = lowrank_uq::testing::random_hermitian(d, rng, !pauli);
    const double fast = ustat_statistic(b, c);
    const double slow = naive_ustat(b, c);
    EXPECT_LE(std::abs(fast - slow), 1e-10 * std::max(1.0, std::abs(slow))) << "t=" << t;
  }
}

TEST(UStat, ZeroDataAndErrors) {
  Rng rng(34);
  const SensingPlan plan = draw_plan(DesignEnsemble::gaussian(3), 10, rng);
  const MeasurementBatch b = make_batch(plan, RVec::Zero(10), NoiseModel::gaussian(1.0));
  EXPECT_EQ(ustat_statistic(b, HermitianMatrix::zero(3)), 0.0);
  const MeasurementBatch one = make_batch(plan.slice(0, 1), RVec::Zero(1), NoiseModel::gaussian(1.0));
  EXPECT_THROW(ustat_statistic(one, HermitianMatrix::zero(3)), std::invalid_argument);
}

TEST(UStat, Radius) {
  const auto theory = UStatConstants::theory(0.0, 3.0);
  EXPECT_DOUBLE_EQ(ustat_radius_sq(0.4, 100, 8, theory), 0.4 + 3.0 * 8 / 100);
  EXPECT_DOUBLE_EQ(ustat_radius_sq(-0.4, 100, 8, theory), 3.0 * 8 / 100);
  const auto sim = UStatConstants::simulation();
  EXPECT_DOUBLE_EQ(ustat_radius_sq(1.0, 5000, 32, sim), 1.0 + 2.5 * 32 / 5000.0 + 6.0 / std::sqrt(5000.0));
  // Theory root solves x = R + C1√x/√n + C2d/n.
  const auto c = UStatConstants::theory(2.0, 1.0);
  const double x = ustat_radius_sq(0.2, 50, 4, c);
  EXPECT_NEAR(x, 0.2 + 2.0 * std::sqrt(x / 50) + 4.0 / 50, 1e-12);
  const auto lvl = UStatConstants::from_level(0.05, 1.0, 4, 50);
  EXPECT_NEAR(lvl.C1, 2.0 * std::sqrt(2.0 * 4.0 / 0.05), 1e-12);
}

TEST(ReAvg, ReducesToRssAtM1) {
  Rng rng(35);
  const auto ens = DesignEnsemble::pauli(1);
  const SensingPlan plan = full_basis_plan(ens, 1);
  const auto theta = random_rank_k_state(2, 2, rng);
  const MeasurementBatch b = measure_gaussian(plan, theta.matrix(), 0.3, rng);
  const HermitianMatrix c = lowrank_uq::testing::random_hermitian(2, rng);
  // m = 1, n = d² = 4: Z̃_k = Y_k − tr(X_k c), σ²d²/n = σ².
  double direct = 0.0;
  for (int k = 0; k < 4; ++k)
    direct += std::pow(b.y[k] - (lowrank_uq::testing::dense_design(plan, k) * c.mat()).trace().real(), 2);
  direct = direct / 4 - 0.09;
  EXPECT_NEAR(reavg_statistic(b, c, 0.3), direct, 1e-12);
  EXPECT_NEAR(reavg_statistic(b, c, 0.3), rss_statistic(b, c, 0.3), 1e-12);
}

TEST(ReAvg, TruthAndErrors) {
  Rng rng(36);
  const auto ens = DesignEnsemble::pauli(2);
  const auto theta = random_rank_k_state(4, 1, rng);
  const MeasurementBatch b = measure_gaussian(full_basis_plan(ens, 3), theta.matrix(), 0.0, rng);
  const ConfidenceReport r = reavg_confidence_set(b, theta.matrix(), 0.0, 0.05);
  EXPECT_NEAR(r.statistic_value, 0.0, 1e-12);
  EXPECT_NEAR(r.radius_sq, 0.0, 1e-12);
  EXPECT_EQ(r.method, Method::ReAvg);

  const MeasurementBatch odd = measure_gaussian(draw_plan(ens, 17, rng), theta.matrix(), 0.1, rng);
  EXPECT_THROW(reavg_statistic(odd, theta.matrix(), 0.1), std::invalid_argument);
  std::vector<std::uint32_t> idx;
  for (std::uint32_t k = 0; k < 16; ++k) idx.push_back(k == 3 ? 4 : k);
  const MeasurementBatch uneven =
      make_batch(SensingPlan::from_indices(ens, idx, 0), RVec::Zero(16), NoiseModel::gaussian(0.1));
  EXPECT_THROW(reavg_statistic(uneven, theta.matrix(), 0.1), std::invalid_argument);
  const MeasurementBatch gauss =
      make_batch(draw_plan(DesignEnsemble::gaussian(4), 16, rng), RVec::Zero(16), NoiseModel::gaussian(0.1));
  EXPECT_THROW(reavg_statistic(gauss, theta.matrix(), 0.1), std::invalid_argument);
}

TEST(Paired, HandValuesAndPairing) {
  const auto ens = DesignEnsemble::pauli(1);
  const SensingPlan plan = SensingPlan::from_indices(ens, {0, 0}, 0);
  const HermitianMatrix c = HermitianMatrix::identity(2) * (1.0 / (2.0 * std::sqrt(2.0)));
  const MeasurementBatch b = make_batch(plan, RVec{{1.0, 2.0}}, NoiseModel::gaussian(1.0));
  EXPECT_NEAR(paired_rss_statistic(b, c), 0.0, 1e-14);

  const MeasurementBatch bad =
      make_batch(SensingPlan::from_indices(ens, {0, 1}, 0), RVec{{1.0, 2.0}}, NoiseModel::gaussian(1.0));
  EXPECT_THROW(paired_rss_statistic(bad, c), std::invalid_argument);
  const MeasurementBatch odd =
      make_batch(SensingPlan::from_indices(ens, {0, 0, 0}, 0), RVec::Zero(3), NoiseModel::gaussian(1.0));
  EXPECT_THROW(paired_rss_statistic(odd, c), std::invalid_argument);

  Rng rng(37);
  const SensingPlan g = paired_plan(DesignEnsemble::gaussian(3), 5, rng);
  const auto theta = random_rank_k_state(3, 1, rng, {true, false});
  EXPECT_NEAR(paired_rss_statistic(measure_gaussian(g, theta.matrix(), 0.0, rng), theta.matrix()), 0.0,
              1e-14);
}

// Each statistic averages to ‖θ − c‖²_F.
TEST(Unbiased, AllStatistics) {
  const int reps = 2000;
  for (double sigma : {0.1, 1.0}) {
    const auto gauss = DesignEnsemble::gaussian(3);
    const auto pauli = DesignEnsemble::pauli(2);
    Rng fix(38);
    const auto th_g = random_rank_k_state(3, 2, fix, {true, false});
    const auto c_g = random_rank_k_state(3, 1, fix, {true, false});
    const auto th_p = random_rank_k_state(4, 2, fix);
    const auto c_p = random_rank_k_state(4, 1, fix);
    const double target_g = sq_dist(th_g.matrix(), c_g.matrix());
    const double target_p = sq_dist(th_p.matrix(), c_p.matrix());

    auto rss = monte_carlo(reps, [&](int r) {
      Rng rng(derive_seed(1, {std::uint64_t(r)}));
      return rss_statistic(measure_gaussian(draw_plan(pauli, 30, rng), th_p.matrix(), sigma, rng),
                           c_p.matrix(), sigma);
    });
    EXPECT_LE(std::abs(rss.mean - target_p), 3 * rss.se) << "rss sigma=" << sigma;

    auto ust = monte_carlo(reps, [&](int r) {
      Rng rng(derive_seed(2, {std::uint64_t(r)}));
      return ustat_statistic(measure_gaussian(draw_plan(gauss, 30, rng), th_g.matrix(), sigma, rng),
                             c_g.matrix());
    });
    EXPECT_LE(std::abs(ust.mean - target_g), 3 * ust.se) << "ustat sigma=" << sigma;

    const SensingPlan full = full_basis_plan(pauli, 2);
    auto rea = monte_carlo(reps, [&](int r) {
      Rng rng(derive_seed(3, {std::uint64_t(r)}));
      return reavg_statistic(measure_gaussian(full, th_p.matrix(), sigma, rng), c_p.matrix(), sigma);
    });
    EXPECT_LE(std::abs(rea.mean - target_p), 3 * rea.se) << "reavg sigma=" << sigma;

    auto pai = monte_carlo(reps, [&](int r) {
      Rng rng(derive_seed(4, {std::uint64_t(r)}));
      return paired_rss_statistic(
          measure_gaussian(paired_plan(gauss, 15, rng), th_g.matrix(), sigma, rng), c_g.matrix());
    });
    EXPECT_LE(std::abs(pai.mean - target_g), 3 * pai.se) << "paired sigma=" << sigma;
  }
}

TEST(Radius, Monotone) {
  const double alpha = 0.05;
  RssOptions shape, implicit, sim;
  implicit.mode = RssMode::ImplicitSolve;
  implicit.z = 3.0;
  sim.regime = ConstantsRegime::Simulation;
  const int d = 4;
  auto radii = [&](double s, int n) {
    return std::vector<double>{
        rss_radius_sq(s, n, d, 0.5, alpha, shape),
        rss_radius_sq(s, n, d, 0.5, alpha, implicit),
        rss_radius_sq(s, n, d, 0.5, alpha, sim),
        ustat_radius_sq(s, n, d, UStatConstants::simulation()),
        ustat_radius_sq(s, n, d, UStatConstants::from_level(alpha, 0.25, d, n)),
        reavg_radius_sq(s, n, d, 0.5, alpha),
    };
  };
  const std::vector<int> ns{16, 32, 64, 128, 512, 4096};
  const std::vector<double> stats{-0.5, -0.1, 0.0, 0.05, 0.2, 1.0, 3.0};
  for (int n : ns)
    for (std::size_t i = 1; i < stats.size(); ++i) {
      const auto lo = radii(stats[i - 1], n), hi = radii(stats[i], n);
      for (std::size_t m = 0; m < lo.size(); ++m) EXPECT_LE(lo[m], hi[m] + 1e-15) << m;
    }
  for (double s : stats)
    for (std::size_t i = 1; i < ns.size(); ++i) {
      const auto a = radii(s, ns[i - 1]), b = radii(s, ns[i]);
      for (std::size_t m = 0; m < a.size(); ++m) EXPECT_GE(a[m], b[m] - 1e-15) << m << " s=" << s;
    }
}

TEST(Report, MembershipIsTheInequality) {
  Rng rng(39);
  const auto ens = DesignEnsemble::pauli(2);
  const auto theta = random_rank_k_state(4, 1, rng);
  const MeasurementBatch b = measure_gaussian(draw_plan(ens, 64, rng), theta.matrix(), 0.1, rng);
  const ConfidenceReport r = rss_confidence_set(b, HermitianMatrix::zero(4), 0.1, 0.05);
  for (int t = 0; t < 50; ++t) {
    const HermitianMatrix v = lowrank_uq::testing::random_hermitian(4, rng) * 0.5;
    EXPECT_EQ(r.contains(v), std::pow(frobenius_norm(v - r.center), 2) <= r.radius_sq);
  }
  // A point exactly on the sphere belongs.
  const HermitianMatrix e = HermitianMatrix::diagonal(RVec{{1.0, 0, 0, 0}}) * r.radius();
  EXPECT_EQ(r.contains(e), e(0, 0).real() * e(0, 0).real() <= r.radius_sq);

  std::ostringstream os;
  write_report_csv_header(os);
  write_report_csv_row(os, r, true);
  EXPECT_EQ(os.str().substr(0, 7), "method,");
  EXPECT_NE(os.str().find("\nrss,frobenius,0.05,64,4,"), std::string::npos);
  EXPECT_EQ(os.str().back(), '\n');
}

TEST(Report, BernoulliAndPairedOptions) {
  Rng rng(40);
  const auto ens = DesignEnsemble::pauli(1);
  const auto theta = random_rank_k_state(2, 1, rng);
  const MeasurementBatch b = measure_bernoulli_pauli(paired_plan(ens, 20, rng), theta, 50, rng);
  RssOptions opts;
  opts.bernoulli = true;
  opts.paired = true;
  const double v = b.noise.variance_bound(2);
  const ConfidenceReport r = rss_confidence_set(b, theta.matrix(), std::sqrt(v), 0.1, opts);
  EXPECT_EQ(r.method, Method::PairedRSS);
  const double xi = std::sqrt(3.0 / 0.1);
  const double expect = 2.0 * (r.statistic_value + xi / std::sqrt(20.0)) +
                        2.0 * std::sqrt(v) * std::sqrt(3.0 / 0.1) / std::sqrt(20.0) * std::sqrt(12.0);
  EXPECT_NEAR(r.radius_sq, std::max(expect, 0.0), 1e-12);
}
