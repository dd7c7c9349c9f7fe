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

#include "lowrank_uq/sensing.hpp"

#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/random/uniform_int_distribution.hpp>

#include "lowrank_uq/tolerances.hpp"

namespace lowrank_uq {

namespace {

std::uint64_t next_plan_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

void check_dims(const SensingPlan& plan, int d, const char* who) {
  if (plan.dim() != d) {
    std::ostringstream msg;
    msg << who << ": plan dimension " << plan.dim() << " differs from matrix dimension " << d;
    throw std::invalid_argument(msg.str());
  }
}

void check_length(const SensingPlan& plan, const RVec& v, const char* who) {
  if (v.size() != plan.n()) {
    std::ostringstream msg;
    msg << who << ": vector length " << v.size() << " differs from plan size " << plan.n();
    throw std::invalid_argument(msg.str());
  }
}

// b[m*d + k] = A(k, m), so that tr(X A) = Σ_{m,k} X(m,k) A(k,m) = x·b for a
// row-major flattened X.
Eigen::VectorXd transpose_flatten(const Eigen::MatrixXd& a) {
  const auto d = a.rows();
  Eigen::VectorXd b(d * d);
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index k = 0; k < d; ++k) b[m * d + k] = a(k, m);
  return b;
}

}  // namespace

std::string to_string(DesignKind kind) {
  return kind == DesignKind::GaussianIsotropic ? "gaussian" : "pauli";
}

DesignKind parse_design_kind(const std::string& s) {
  if (s == "gaussian") return DesignKind::GaussianIsotropic;
  if (s == "pauli") return DesignKind::PauliBasis;
  throw std::invalid_argument("unknown design kind '" + s + "'");
}

DesignEnsemble DesignEnsemble::gaussian(int d) {
  if (d < 1) throw std::invalid_argument("DesignEnsemble: dimension must be positive");
  DesignEnsemble e;
  e.kind_ = DesignKind::GaussianIsotropic;
  e.dim_ = d;
  return e;
}

DesignEnsemble DesignEnsemble::pauli(int qubits) {
  DesignEnsemble e;
  e.kind_ = DesignKind::PauliBasis;
  e.basis_ = PauliBasis::get(qubits);
  e.qubits_ = qubits;
  e.dim_ = 1 << qubits;
  return e;
}

DesignEnsemble DesignEnsemble::pauli_for_dim(int d) {
  if (d < 2 || (d & (d - 1)) != 0) {
    std::ostringstream msg;
    msg << "Pauli design requires a power-of-two dimension, got " << d;
    throw std::invalid_argument(msg.str());
  }
  int qubits = 0;
  while ((1 << qubits) < d) ++qubits;
  return pauli(qubits);
}

DesignEnsemble DesignEnsemble::make(DesignKind kind, int d) {
  return kind == DesignKind::PauliBasis ? pauli_for_dim(d) : gaussian(d);
}

Eigen::Map<const Eigen::MatrixXd> SensingPlan::gaussian_block() const {
  const Eigen::Index dd = Eigen::Index(dim()) * dim();
  return {gaussian_->data(), dd, n_};
}

SensingPlan SensingPlan::from_indices(DesignEnsemble ensemble,
                                      std::vector<std::uint32_t> indices, std::uint64_t seed) {
  if (!ensemble.is_pauli()) throw std::invalid_argument("from_indices: ensemble is not Pauli");
  const auto limit = static_cast<std::uint32_t>(ensemble.dim()) * ensemble.dim();
  for (auto y : indices)
    if (y >= limit) throw std::invalid_argument("from_indices: index out of range");
  SensingPlan p;
  p.ensemble_ = std::move(ensemble);
  p.n_ = static_cast<int>(indices.size());
  p.seed_ = seed;
  p.id_ = next_plan_id();
  p.indices_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(indices));
  return p;
}

SensingPlan SensingPlan::gaussian_from_draws(DesignEnsemble ensemble, std::vector<double> draws) {
  const std::size_t dd = std::size_t(ensemble.dim()) * ensemble.dim();
  if (ensemble.is_pauli() || draws.size() % dd != 0)
    throw std::invalid_argument("gaussian_from_draws: bad ensemble or draw buffer size");
  SensingPlan p;
  p.ensemble_ = std::move(ensemble);
  p.n_ = static_cast<int>(draws.size() / dd);
  p.id_ = next_plan_id();
  p.gaussian_ = std::make_shared<const std::vector<double>>(std::move(draws));
  return p;
}

SensingPlan SensingPlan::gaussian_from_seed(DesignEnsemble ensemble, int n, std::uint64_t seed) {
  const std::size_t dd = std::size_t(ensemble.dim()) * ensemble.dim();
  std::vector<double> draws(dd * n);
  Rng rng(seed);
  NormalSampler normal;
  for (double& x : draws) x = normal(rng);
  SensingPlan p = gaussian_from_draws(std::move(ensemble), std::move(draws));
  p.seed_ = seed;
  p.seed_derived_ = true;
  return p;
}

SensingPlan SensingPlan::slice(int begin, int count) const {
  if (begin < 0 || count < 0 || begin + count > n_)
    throw std::invalid_argument("SensingPlan::slice: range out of bounds");
  if (ensemble_.is_pauli()) {
    std::vector<std::uint32_t> idx(indices_->begin() + begin, indices_->begin() + begin + count);
    return from_indices(ensemble_, std::move(idx), seed_);
  }
  const std::size_t dd = std::size_t(dim()) * dim();
  std::vector<double> draws(gaussian_->begin() + dd * begin,
                            gaussian_->begin() + dd * (begin + count));
  SensingPlan p = gaussian_from_draws(ensemble_, std::move(draws));
  p.seed_ = seed_;
  return p;
}

SensingPlan draw_plan(const DesignEnsemble& ensemble, int n, Rng& rng) {
  return draw_plan_seeded(ensemble, n, rng());
}

SensingPlan draw_plan_seeded(const DesignEnsemble& ensemble, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("draw_plan: n must be positive");
  if (!ensemble.is_pauli()) return SensingPlan::gaussian_from_seed(ensemble, n, seed);
  Rng rng(seed);
  const auto count = static_cast<std::uint32_t>(ensemble.dim()) * ensemble.dim();
  boost::random::uniform_int_distribution<std::uint32_t> pick(0, count - 1);
  std::vector<std::uint32_t> idx(n);
  for (auto& y : idx) y = pick(rng);
  return SensingPlan::from_indices(ensemble, std::move(idx), seed);
}

SensingPlan full_basis_plan(const DesignEnsemble& ensemble, int m) {
  if (!ensemble.is_pauli()) throw std::invalid_argument("full_basis_plan: Pauli design required");
  if (m < 1) throw std::invalid_argument("full_basis_plan: m must be positive");
  const auto count = static_cast<std::uint32_t>(ensemble.dim()) * ensemble.dim();
  std::vector<std::uint32_t> idx;
  idx.reserve(std::size_t(count) * m);
  for (std::uint32_t y = 0; y < count; ++y)
    for (int l = 0; l < m; ++l) idx.push_back(y);
  return SensingPlan::from_indices(ensemble, std::move(idx), 0);
}

SensingPlan paired_plan(const DesignEnsemble& ensemble, int half, Rng& rng) {
  const SensingPlan base = draw_plan(ensemble, half, rng);
  if (ensemble.is_pauli()) {
    std::vector<std::uint32_t> idx = base.indices();
    idx.insert(idx.end(), base.indices().begin(), base.indices().end());
    return SensingPlan::from_indices(ensemble, std::move(idx), base.seed());
  }
  const std::size_t dd = std::size_t(base.dim()) * base.dim();
  std::vector<double> draws(base.gaussian_draw(0), base.gaussian_draw(0) + dd * half);
  draws.insert(draws.end(), draws.begin(), draws.begin() + dd * half);
  return SensingPlan::gaussian_from_draws(ensemble, std::move(draws));
}

RVec apply_sampling(const SensingPlan& plan, const HermitianMatrix& a) {
  check_dims(plan, a.dim(), "apply_sampling");
  const int n = plan.n();
  RVec out(n);
  if (plan.ensemble().is_pauli()) {
    const PauliBasis& basis = plan.ensemble().basis();
    const double d = plan.dim();
    for (int i = 0; i < n; ++i) {
      const cplx t = d * basis[plan.index(i)].trace_product(a.mat());
      if (std::abs(t.imag()) > tol::kRealTrace)
        throw NumericalError("apply_sampling: non-real trace for Pauli draw");
      out[i] = t.real();
    }
    return out;
  }
  out.noalias() = plan.gaussian_block().transpose() * transpose_flatten(a.mat().real());
  if (!a.is_real()) {
    const RVec im = plan.gaussian_block().transpose() * transpose_flatten(a.mat().imag());
    const double worst = im.cwiseAbs().maxCoeff();
    if (worst > tol::kRealTrace) {
      std::ostringstream msg;
      msg << "apply_sampling: Gaussian design needs a real symmetric argument (imaginary trace "
          << worst << ")";
      throw NumericalError(msg.str());
    }
  }
  return out;
}

CMat weighted_design_sum(const SensingPlan& plan, const RVec& w) {
  check_length(plan, w, "weighted_design_sum");
  const int d = plan.dim();
  if (plan.ensemble().is_pauli()) {
    const PauliBasis& basis = plan.ensemble().basis();
    std::vector<double> coef(basis.size(), 0.0);
    for (int i = 0; i < plan.n(); ++i) coef[plan.index(i)] += w[i];
    CMat m = CMat::Zero(d, d);
    for (std::uint32_t y = 0; y < basis.size(); ++y)
      if (coef[y] != 0.0) basis[y].add_to(m, d * coef[y]);
    return m;
  }
  const Eigen::VectorXd flat = plan.gaussian_block() * w;
  // flat is row-major: flat[m*d + k] = Σ w_i X^i(m,k).
  Eigen::MatrixXd m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = flat[r * d + c];
  return m.cast<cplx>();
}

HermitianMatrix adjoint_average(const SensingPlan& plan, const RVec& y) {
  return HermitianMatrix::hermitize(weighted_design_sum(plan, y) / static_cast<double>(plan.n()));
}

RVec design_sq_norms(const SensingPlan& plan) {
  if (plan.ensemble().is_pauli()) {
    const double d = plan.dim();
    return RVec::Constant(plan.n(), d * d);
  }
  return plan.gaussian_block().colwise().squaredNorm().transpose();
}

double isometry_deviation(const SensingPlan& plan, const HermitianMatrix& theta) {
  const double f2 = theta.mat().squaredNorm();
  if (f2 == 0.0) throw std::invalid_argument("isometry_deviation: θ must be non-zero");
  const RVec v = apply_sampling(plan, theta);
  return std::abs(v.squaredNorm() / plan.n() / f2 - 1.0);
}

HermitianMatrix random_rank_k_unit(const DesignEnsemble& ensemble, int k, Rng& rng) {
  const int d = ensemble.dim();
  const CMat q = haar_isometry(d, k, rng, !ensemble.is_pauli());
  NormalSampler normal;
  RVec lam(k);
  for (int j = 0; j < k; ++j) lam[j] = normal(rng);
  if (lam.norm() == 0.0) lam.setConstant(1.0);
  lam /= lam.norm();
  return HermitianMatrix::hermitize(q * lam.cast<cplx>().asDiagonal() * q.adjoint());
}

double empirical_rip(const DesignEnsemble& ensemble, int n, int k, int trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("empirical_rip: trials must be positive");
  const SensingPlan plan = draw_plan(ensemble, n, rng);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t)
    worst = std::max(worst, isometry_deviation(plan, random_rank_k_unit(ensemble, k, rng)));
  return worst;
}

double rip_rate(int d, int n, int k, double c) {
  return c * std::sqrt(static_cast<double>(k) * d * std::log(static_cast<double>(d)) / n);
}

void write_plan(std::ostream& os, const SensingPlan& plan) {
  const bool pauli = plan.ensemble().is_pauli();
  if (!pauli && !plan.seed_derived())
    throw std::invalid_argument("write_plan: Gaussian plan is not reproducible from its seed");
  os << to_string(plan.ensemble().kind()) << ' ' << plan.dim() << ' ' << plan.n() << ' '
     << plan.seed() << '\n';
  if (pauli)
    for (auto y : plan.indices()) os << y << '\n';
}

SensingPlan read_plan(std::istream& is) {
  std::string kind;
  int d = 0;
  int n = 0;
  std::uint64_t seed = 0;
  if (!(is >> kind >> d >> n >> seed) || n < 1)
    throw std::invalid_argument("read_plan: malformed header");
  const DesignEnsemble ens = DesignEnsemble::make(parse_design_kind(kind), d);
  if (!ens.is_pauli()) return SensingPlan::gaussian_from_seed(ens, n, seed);
  std::vector<std::uint32_t> idx(n);
  for (auto& y : idx)
    if (!(is >> y)) throw std::invalid_argument("read_plan: truncated index list");
  return SensingPlan::from_indices(ens, std::move(idx), seed);
}

}  // namespace lowrank_uq
