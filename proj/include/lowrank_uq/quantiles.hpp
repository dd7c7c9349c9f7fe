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

#include <string>

namespace lowrank_uq {

enum class ConstantsRegime { Theory, Simulation };
std::string to_string(ConstantsRegime r);
ConstantsRegime parse_regime(const std::string& s);

/// ξ with P((1/√n) Σ(ε_i² − σ²) > ξ) = alpha for ε_i ~ N(0, σ²):
/// ξ = σ²(Q_{χ²_n}(1 − alpha) − n)/√n.
double xi_quantile(double alpha, double sigma, int n);

/// Upper standard normal quantile: P(N(0,1) > z) = alpha.
double normal_upper_quantile(double alpha);

/// log(3/alpha).
double z_alpha(double alpha);

/// 1/[(16 + 8/3) K²].
double pauli_concentration(double K);

/// z = log(6/alpha)/C(K), so that 2e^{−C(K)z} = alpha/3.
double pauli_z_constant(double alpha, double K);

struct QuantileConstants {
  double alpha = 0.05;
  double z_alpha = 0.0;
  double xi = 0.0;
  double z = 0.0;
  ConstantsRegime regime = ConstantsRegime::Theory;

  /// Constants of the residual-sum-of-squares set at level alpha: z_{α/3},
  /// ξ_{α/3,σ} for n samples, and z = 0 (Gaussian) or the Pauli constant.
  static QuantileConstants for_rss(double alpha, double sigma, int n, bool pauli,
                                   ConstantsRegime regime = ConstantsRegime::Theory);
};

}  // namespace lowrank_uq
