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
#include <memory>
#include <span>
#include <vector>

#include "lowrank_uq/matrix.hpp"

namespace lowrank_uq {

/// Normalized tensor product 2^{-N/2} σ^{y_1} ⊗ … ⊗ σ^{y_N}. Each row has a
/// single non-zero entry, stored as (column, value) per row.
///
/// Words are indexed base 4 with y_1 as the most significant digit, and y_1
/// acts on the most significant bit of the row index.
class PauliElement {
 public:
  PauliElement(int qubits, std::uint32_t index);

  int qubits() const { return qubits_; }
  int dim() const { return static_cast<int>(col_.size()); }
  std::uint32_t index() const { return index_; }
  int column(int row) const { return col_[row]; }
  cplx value(int row) const { return val_[row]; }
  bool is_identity() const { return index_ == 0; }
  bool is_diagonal() const { return x_mask_ == 0; }

  /// tr(E A) in O(d).
  cplx trace_product(const CMat& a) const;
  /// m += w E in O(d).
  void add_to(CMat& m, cplx w) const;
  HermitianMatrix dense() const;

 private:
  int qubits_;
  std::uint32_t index_;
  std::uint32_t x_mask_ = 0;
  std::vector<int> col_;
  std::vector<cplx> val_;
};

/// Word digits (y_1, …, y_N) → basis index.
std::uint32_t pauli_index(std::span<const int> word);

/// Dense basis element for a word; throws on symbols outside {0,1,2,3} or
/// N outside [1, 8].
HermitianMatrix pauli_basis_element(int qubits, std::span<const int> word);

/// Memoized sparse basis of all 4^N elements for a given qubit count.
class PauliBasis {
 public:
  static std::shared_ptr<const PauliBasis> get(int qubits);

  int qubits() const { return qubits_; }
  int dim() const { return 1 << qubits_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(elements_.size()); }
  const PauliElement& operator[](std::uint32_t index) const { return elements_[index]; }

  /// Coefficients ⟨E_y, A⟩_F for every y (real for Hermitian A).
  std::vector<double> coefficients(const HermitianMatrix& a) const;

  explicit PauliBasis(int qubits);

 private:
  int qubits_;
  std::vector<PauliElement> elements_;
};

}  // namespace lowrank_uq
