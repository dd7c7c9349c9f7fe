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

#include "lowrank_uq/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "lowrank_uq/tolerances.hpp"

namespace lowrank_uq {

HermitianMatrix::HermitianMatrix(const CMat& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0)
    throw std::invalid_argument("HermitianMatrix: entries must be square and non-empty");
  const double scale = std::max(1.0, entries.norm());
  const double asym = (entries - entries.adjoint()).norm();
  if (asym > tol::kHermitian * scale) {
    std::ostringstream msg;
    msg << "HermitianMatrix: ‖A − A†‖_F = " << asym << " exceeds tolerance";
    throw std::invalid_argument(msg.str());
  }
  m_ = (entries + entries.adjoint()) / 2.0;
}

HermitianMatrix::HermitianMatrix(const Eigen::MatrixXd& real_entries)
    : HermitianMatrix(CMat(real_entries.cast<cplx>())) {}

HermitianMatrix HermitianMatrix::zero(int d) { return {CMat::Zero(d, d), Unchecked{}}; }

HermitianMatrix HermitianMatrix::identity(int d) {
  return {CMat::Identity(d, d), Unchecked{}};
}

HermitianMatrix HermitianMatrix::diagonal(const RVec& diag) {
  return {CMat(diag.cast<cplx>().asDiagonal()), Unchecked{}};
}

HermitianMatrix HermitianMatrix::hermitize(const CMat& m) {
  return {(m + m.adjoint()) / 2.0, Unchecked{}};
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  m_ += o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) {
  m_ -= o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

double inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner: dimension mismatch");
  return (a.mat().conjugate().cwiseProduct(b.mat())).sum().real();
}

QuantumState::QuantumState(HermitianMatrix base) : base_(std::move(base)) {
  const double tr = base_.trace().real();
  if (std::abs(tr - 1.0) > tol::kState) {
    std::ostringstream msg;
    msg << "QuantumState: trace " << tr << " differs from 1";
    throw std::invalid_argument(msg.str());
  }
  const double lmin = eigh(base_).eigenvalues.minCoeff();
  if (lmin < -tol::kState) {
    std::ostringstream msg;
    msg << "QuantumState: smallest eigenvalue " << lmin << " is negative";
    throw std::invalid_argument(msg.str());
  }
}

QuantumState QuantumState::maximally_mixed(int d) {
  return QuantumState(HermitianMatrix::identity(d) * (1.0 / d));
}

HermitianMatrix SpectralDecomposition::reconstruct() const {
  const CMat& v = eigenvectors;
  return HermitianMatrix::hermitize(v * eigenvalues.cast<cplx>().asDiagonal() * v.adjoint());
}

double frobenius_norm(const HermitianMatrix& a) { return a.mat().norm(); }

double nuclear_norm(const HermitianMatrix& a) {
  return eigh(a).eigenvalues.cwiseAbs().sum();
}

double operator_norm(const HermitianMatrix& a) {
  return eigh(a).eigenvalues.cwiseAbs().maxCoeff();
}

SpectralDecomposition eigh(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMat> solver(a.mat());
  const int d = a.dim();
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigh: solver did not converge for d=" << d;
    throw NumericalError(msg.str());
  }
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  const double residual = (out.reconstruct().mat() - a.mat()).norm();
  const double scale = a.mat().norm();
  if (residual > tol::kEigenResidual * std::max(scale, 1e-300) && residual > 1e-300) {
    std::ostringstream msg;
    msg << "eigh: reconstruction residual " << residual << " exceeds tolerance";
    throw NumericalError(msg.str());
  }
  return out;
}

int numerical_rank(const HermitianMatrix& a, double tol) {
  const RVec ev = eigh(a).eigenvalues;
  return static_cast<int>((ev.array().abs() > tol).count());
}

namespace {

void check_rank_arg(int k, int d, const char* who) {
  if (k < 1 || k > d) {
    std::ostringstream msg;
    msg << who << ": rank " << k << " outside [1, " << d << "]";
    throw std::invalid_argument(msg.str());
  }
}

HermitianMatrix assemble(const CMat& vecs, const RVec& vals) {
  return HermitianMatrix::hermitize(vecs * vals.cast<cplx>().asDiagonal() * vecs.adjoint());
}

}  // namespace

HermitianMatrix best_rank_k(const HermitianMatrix& a, int k) {
  const int d = a.dim();
  check_rank_arg(k, d, "best_rank_k");
  const SpectralDecomposition sd = eigh(a);
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(sd.eigenvalues[i]) > std::abs(sd.eigenvalues[j]);
  });
  CMat vecs(d, k);
  RVec vals(k);
  for (int j = 0; j < k; ++j) {
    vecs.col(j) = sd.eigenvectors.col(order[j]);
    vals[j] = sd.eigenvalues[order[j]];
  }
  return assemble(vecs, vals);
}

RVec project_simplex(const RVec& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

QuantumState project_state_space(const HermitianMatrix& a) {
  return project_rank_k_state_space(a, a.dim());
}

QuantumState project_rank_k_state_space(const HermitianMatrix& a, int k) {
  const int d = a.dim();
  check_rank_arg(k, d, "project_rank_k_state_space");
  const SpectralDecomposition sd = eigh(a);
  const RVec weights = project_simplex(sd.eigenvalues.head(k));
  return QuantumState(assemble(sd.eigenvectors.leftCols(k), weights));
}

CMat haar_isometry(int d, int k, Rng& rng, bool real) {
  check_rank_arg(k, d, "haar_isometry");
  NormalSampler normal;
  CMat g(d, k);
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < d; ++r)
      g(r, c) = real ? cplx(normal(rng), 0.0) : cplx(normal(rng), normal(rng));
  // QR with the phases of R's diagonal absorbed into Q.
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ() * CMat::Identity(d, k);
  const CMat& rmat = qr.matrixQR();
  for (int c = 0; c < k; ++c) {
    const cplx rcc = rmat(c, c);
    if (std::abs(rcc) > 0.0) q.col(c) *= rcc / std::abs(rcc);
  }
  return q;
}

QuantumState random_rank_k_state(int d, int k, Rng& rng, RandomStateOptions opts) {
  check_rank_arg(k, d, "random_rank_k_state");
  const CMat q = haar_isometry(d, k, rng, opts.real);
  RVec w(k);
  if (opts.uniform_weights) {
    w.setConstant(1.0 / k);
  } else {
    // Flat Dirichlet via normalized exponentials.
    for (int j = 0; j < k; ++j) w[j] = -std::log1p(-uniform01(rng));
    w /= w.sum();
  }
  return QuantumState(assemble(q, w));
}

std::string format_complex(cplx z) {
  char buf[64];
  auto put = [&](char* p, double x) {
    return std::to_chars(p, buf + sizeof(buf), x).ptr;
  };
  char* p = put(buf, z.real());
  if (!std::signbit(z.imag())) *p++ = '+';
  p = put(p, z.imag());
  *p++ = 'i';
  return std::string(buf, p);
}

cplx parse_complex(const std::string& token) {
  auto fail = [&]() -> cplx {
    throw std::invalid_argument("parse_complex: malformed entry '" + token + "'");
  };
  if (token.size() < 3 || token.back() != 'i') return fail();
  std::size_t split = std::string::npos;
  for (std::size_t j = token.size() - 2; j >= 1; --j) {
    const char c = token[j];
    if ((c == '+' || c == '-') && token[j - 1] != 'e' && token[j - 1] != 'E') {
      split = j;
      break;
    }
  }
  if (split == std::string::npos) return fail();
  double re = 0.0;
  double im = 0.0;
  const char* begin = token.data();
  auto r1 = std::from_chars(begin, begin + split, re);
  if (r1.ec != std::errc{} || r1.ptr != begin + split) return fail();
  const char* im_begin = begin + split + (token[split] == '+' ? 1 : 0);
  const char* im_end = begin + token.size() - 1;
  auto r2 = std::from_chars(im_begin, im_end, im);
  if (r2.ec != std::errc{} || r2.ptr != im_end) return fail();
  return {re, im};
}

void write_matrix(std::ostream& os, const HermitianMatrix& a) {
  const int d = a.dim();
  os << d << '\n';
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      if (c) os << ' ';
      os << format_complex(a(r, c));
    }
    os << '\n';
  }
}

HermitianMatrix read_matrix(std::istream& is) {
  int d = 0;
  if (!(is >> d) || d < 1) throw std::invalid_argument("read_matrix: bad dimension line");
  CMat m(d, d);
  std::string tok;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      if (!(is >> tok)) throw std::invalid_argument("read_matrix: truncated input");
      m(r, c) = parse_complex(tok);
    }
  return HermitianMatrix(m);
}

}  // namespace lowrank_uq
