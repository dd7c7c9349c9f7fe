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

#include "lowrank_uq/pauli.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace lowrank_uq {

namespace {

void check_qubits(int qubits) {
  if (qubits < 1 || qubits > 8) {
    std::ostringstream msg;
    msg << "Pauli basis: qubit count " << qubits << " outside [1, 8]";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

PauliElement::PauliElement(int qubits, std::uint32_t index) : qubits_(qubits), index_(index) {
  check_qubits(qubits);
  const int d = 1 << qubits;
  if (index >= static_cast<std::uint32_t>(d) * static_cast<std::uint32_t>(d))
    throw std::invalid_argument("PauliElement: index out of range");
  // Qubit q (0-based from the left) is digit q of the word and bit N-1-q of
  // the row index.
  std::vector<int> digits(qubits);
  for (int q = qubits - 1, rest = static_cast<int>(index); q >= 0; --q, rest /= 4)
    digits[q] = rest % 4;
  for (int q = 0; q < qubits; ++q)
    if (digits[q] == 1 || digits[q] == 2) x_mask_ |= 1u << (qubits - 1 - q);

  const double norm = std::pow(2.0, -0.5 * qubits);
  col_.resize(d);
  val_.resize(d);
  for (int r = 0; r < d; ++r) {
    cplx v = norm;
    for (int q = 0; q < qubits; ++q) {
      const int bit = (r >> (qubits - 1 - q)) & 1;
      switch (digits[q]) {
        case 2:
          v *= bit ? cplx(0, 1) : cplx(0, -1);
          break;
        case 3:
          if (bit) v = -v;
          break;
        default:
          break;
      }
    }
    col_[r] = r ^ static_cast<int>(x_mask_);
    val_[r] = v;
  }
}

cplx PauliElement::trace_product(const CMat& a) const {
  cplx acc = 0.0;
  for (int r = 0; r < dim(); ++r) acc += val_[r] * a(col_[r], r);
  return acc;
}

void PauliElement::add_to(CMat& m, cplx w) const {
  for (int r = 0; r < dim(); ++r) m(r, col_[r]) += w * val_[r];
}

HermitianMatrix PauliElement::dense() const {
  CMat m = CMat::Zero(dim(), dim());
  add_to(m, 1.0);
  return HermitianMatrix(m);
}

std::uint32_t pauli_index(std::span<const int> word) {
  std::uint32_t idx = 0;
  for (int s : word) {
    if (s < 0 || s > 3) {
      std::ostringstream msg;
      msg << "Pauli word: invalid symbol " << s;
      throw std::invalid_argument(msg.str());
    }
    idx = idx * 4 + static_cast<std::uint32_t>(s);
  }
  return idx;
}

HermitianMatrix pauli_basis_element(int qubits, std::span<const int> word) {
  check_qubits(qubits);
  if (static_cast<int>(word.size()) != qubits)
    throw std::invalid_argument("pauli_basis_element: word length differs from qubit count");
  return PauliElement(qubits, pauli_index(word)).dense();
}

PauliBasis::PauliBasis(int qubits) : qubits_(qubits) {
  check_qubits(qubits);
  const std::uint32_t count = 1u << (2 * qubits);
  elements_.reserve(count);
  for (std::uint32_t y = 0; y < count; ++y) elements_.emplace_back(qubits, y);
}

std::shared_ptr<const PauliBasis> PauliBasis::get(int qubits) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const PauliBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[qubits];
  if (!slot) slot = std::make_shared<const PauliBasis>(qubits);
  return slot;
}

std::vector<double> PauliBasis::coefficients(const HermitianMatrix& a) const {
  std::vector<double> out(size());
  for (std::uint32_t y = 0; y < size(); ++y) out[y] = elements_[y].trace_product(a.mat()).real();
  return out;
}

}  // namespace lowrank_uq
