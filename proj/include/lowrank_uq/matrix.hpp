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

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "lowrank_uq/rng.hpp"

namespace lowrank_uq {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense d×d complex Hermitian matrix. Construction checks Hermiticity and
/// then stores the exactly symmetrized value (A + A†)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMat& entries);
  explicit HermitianMatrix(const Eigen::MatrixXd& real_entries);

  static HermitianMatrix zero(int d);
  static HermitianMatrix identity(int d);
  static HermitianMatrix diagonal(const RVec& diag);
  /// Symmetrizes without checking; for results of algebra that is Hermitian
  /// up to rounding.
  static HermitianMatrix hermitize(const CMat& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& mat() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }
  cplx trace() const { return m_.trace(); }
  /// True when every imaginary part vanishes.
  bool is_real() const { return m_.imag().isZero(0.0); }

  HermitianMatrix& operator+=(const HermitianMatrix& o);
  HermitianMatrix& operator-=(const HermitianMatrix& o);
  HermitianMatrix& operator*=(double s);

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }

 private:
  struct Unchecked {};
  HermitianMatrix(CMat m, Unchecked) : m_(std::move(m)) {}
  CMat m_;
};

/// Frobenius inner product Re tr(A† B).
double inner(const HermitianMatrix& a, const HermitianMatrix& b);

/// Element of the state space: positive semi-definite with unit trace.
class QuantumState {
 public:
  /// Throws std::invalid_argument when the trace or spectrum is out of range.
  explicit QuantumState(HermitianMatrix base);

  static QuantumState maximally_mixed(int d);

  const HermitianMatrix& matrix() const { return base_; }
  int dim() const { return base_.dim(); }

 private:
  HermitianMatrix base_;
};

struct SpectralDecomposition {
  RVec eigenvalues;   // descending
  CMat eigenvectors;  // column j pairs with eigenvalues[j]

  HermitianMatrix reconstruct() const;
};

double frobenius_norm(const HermitianMatrix& a);
double nuclear_norm(const HermitianMatrix& a);
double operator_norm(const HermitianMatrix& a);

/// Eigendecomposition with eigenvalues sorted non-increasing. Throws
/// NumericalError (with the residual in the message) if the solver does not
/// converge or the reconstruction residual exceeds tolerance.
SpectralDecomposition eigh(const HermitianMatrix& a);

/// Numerical rank: number of eigenvalues with |λ| > tol.
int numerical_rank(const HermitianMatrix& a, double tol = 1e-10);

/// Frobenius-closest matrix of rank ≤ k: keeps the k eigenpairs of largest
/// |λ|.
HermitianMatrix best_rank_k(const HermitianMatrix& a, int k);

/// Euclidean projection of v onto the probability simplex (sort and
/// threshold).
RVec project_simplex(const RVec& v);

/// Frobenius projection onto the state space.
QuantumState project_state_space(const HermitianMatrix& a);

/// Frobenius projection onto states of rank ≤ k: top-k eigenvalues
/// (algebraic order) are kept and projected onto the simplex.
QuantumState project_rank_k_state_space(const HermitianMatrix& a, int k);

/// d×k matrix with Haar-distributed orthonormal columns (orthogonal when
/// `real`).
CMat haar_isometry(int d, int k, Rng& rng, bool real = false);

struct RandomStateOptions {
  bool real = false;            // orthogonal instead of unitary eigenvectors
  bool uniform_weights = false; // w = 1/k instead of a flat-Dirichlet draw
};

/// Σ w_j v_j v_j† with Haar-random orthonormal v_j and simplex weights w.
QuantumState random_rank_k_state(int d, int k, Rng& rng,
                                 RandomStateOptions opts = {});

/// Fixture text format: "d" on the first line, then d rows of "re+imi".
void write_matrix(std::ostream& os, const HermitianMatrix& a);
HermitianMatrix read_matrix(std::istream& is);
std::string format_complex(cplx z);
cplx parse_complex(const std::string& token);

}  // namespace lowrank_uq
