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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lowrank_uq/matrix.hpp"
#include "lowrank_uq/pauli.hpp"
#include "lowrank_uq/rng.hpp"

namespace lowrank_uq {

enum class DesignKind { GaussianIsotropic, PauliBasis };

std::string to_string(DesignKind kind);
DesignKind parse_design_kind(const std::string& s);

class DesignEnsemble {
 public:
  static DesignEnsemble gaussian(int d);
  /// d = 2^qubits, coherence K = 1.
  static DesignEnsemble pauli(int qubits);
  /// Pauli ensemble for dimension d; throws unless d is a power of two.
  static DesignEnsemble pauli_for_dim(int d);
  static DesignEnsemble make(DesignKind kind, int d);

  DesignKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int qubits() const { return qubits_; }
  double coherence() const { return 1.0; }
  bool is_pauli() const { return kind_ == DesignKind::PauliBasis; }
  const PauliBasis& basis() const { return *basis_; }

 private:
  DesignKind kind_ = DesignKind::GaussianIsotropic;
  int dim_ = 0;
  int qubits_ = 0;
  std::shared_ptr<const PauliBasis> basis_;
};

/// A realized sequence of n design draws X^1, …, X^n. Gaussian draws are
/// d×d real matrices with i.i.d. N(0,1) entries; Pauli draws are basis
/// indices y with X = d·E_y. Immutable; copies share storage.
class SensingPlan {
 public:
  const DesignEnsemble& ensemble() const { return ensemble_; }
  int dim() const { return ensemble_.dim(); }
  int n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t id() const { return id_; }

  /// Pauli index of draw i.
  std::uint32_t index(int i) const { return (*indices_)[i]; }
  const std::vector<std::uint32_t>& indices() const { return *indices_; }
  /// Gaussian draw i as a row-major d×d block.
  const double* gaussian_draw(int i) const {
    return gaussian_->data() + std::size_t(i) * dim() * dim();
  }
  /// All Gaussian draws as a d²×n column-major block (column i = draw i,
  /// row-major within the draw).
  Eigen::Map<const Eigen::MatrixXd> gaussian_block() const;
  /// True when the Gaussian draws are reproducible from seed() alone.
  bool seed_derived() const { return seed_derived_; }

  /// Constructors used by draw_plan and the deserializer.
  static SensingPlan from_indices(DesignEnsemble ensemble, std::vector<std::uint32_t> indices,
                                  std::uint64_t seed);
  static SensingPlan gaussian_from_seed(DesignEnsemble ensemble, int n, std::uint64_t seed);
  static SensingPlan gaussian_from_draws(DesignEnsemble ensemble, std::vector<double> draws);
  /// Copy of draws [begin, begin + count).
  SensingPlan slice(int begin, int count) const;

 private:
  DesignEnsemble ensemble_;
  int n_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t id_ = 0;
  std::shared_ptr<const std::vector<std::uint32_t>> indices_;
  std::shared_ptr<const std::vector<double>> gaussian_;
  bool seed_derived_ = false;
};

/// Fresh plan; the stream seed is drawn from rng and recorded on the plan.
SensingPlan draw_plan(const DesignEnsemble& ensemble, int n, Rng& rng);
SensingPlan draw_plan_seeded(const DesignEnsemble& ensemble, int n, std::uint64_t seed);

/// Pauli plan measuring every basis index exactly m times, grouped by index.
SensingPlan full_basis_plan(const DesignEnsemble& ensemble, int m);

/// Plan of size 2·half where draw i and draw i + half share one design.
SensingPlan paired_plan(const DesignEnsemble& ensemble, int half, Rng& rng);

/// (tr(X^i A))_i. Throws on dimension mismatch or a non-real trace.
RVec apply_sampling(const SensingPlan& plan, const HermitianMatrix& a);

/// (1/n) Σ X^i y_i, Hermitized.
HermitianMatrix adjoint_average(const SensingPlan& plan, const RVec& y);

/// Σ w_i X^i without symmetrization (the U-statistic needs the raw sum).
CMat weighted_design_sum(const SensingPlan& plan, const RVec& w);

/// ‖X^i‖_F² for each draw.
RVec design_sq_norms(const SensingPlan& plan);

/// |(1/n)‖𝒳θ‖² / ‖θ‖_F² − 1| for one fixed θ.
double isometry_deviation(const SensingPlan& plan, const HermitianMatrix& theta);

/// Random rank-k Hermitian matrix with unit Frobenius norm (real when the
/// ensemble is Gaussian).
HermitianMatrix random_rank_k_unit(const DesignEnsemble& ensemble, int k, Rng& rng);

/// Monte-Carlo lower bound of the RIP constant τ_n(k): one plan, `trials`
/// random rank-k unit matrices, maximal isometry deviation.
double empirical_rip(const DesignEnsemble& ensemble, int n, int k, int trials, Rng& rng);

/// τ_n(k) = c √(k d log(d) / n) with the polylog exponent fixed to 1.
double rip_rate(int d, int n, int k, double c = 1.0);

/// "kind d n seed" header, then one index per line for Pauli plans.
void write_plan(std::ostream& os, const SensingPlan& plan);
SensingPlan read_plan(std::istream& is);

}  // namespace lowrank_uq
