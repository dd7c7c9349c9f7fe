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

#include "lowrank_uq/quantiles.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace lowrank_uq {

namespace {

void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument(std::string(who) + ": alpha must lie in (0, 1)");
}

}  // namespace

std::string to_string(ConstantsRegime r) {
  return r == ConstantsRegime::Theory ? "theory" : "simulation";
}

ConstantsRegime parse_regime(const std::string& s) {
  if (s == "theory") return ConstantsRegime::Theory;
  if (s == "simulation") return ConstantsRegime::Simulation;
  throw std::invalid_argument("unknown constants regime '" + s + "'");
}

double xi_quantile(double alpha, double sigma, int n) {
  check_alpha(alpha, "xi_quantile");
  if (n < 1) throw std::invalid_argument("xi_quantile: n must be positive");
  if (sigma == 0.0) return 0.0;
  const boost::math::chi_squared chi(n);
  const double q = boost::math::quantile(boost::math::complement(chi, alpha));
  return sigma * sigma * (q - n) / std::sqrt(double(n));
}

double normal_upper_quantile(double alpha) {
  check_alpha(alpha, "normal_upper_quantile");
  return boost::math::quantile(boost::math::complement(boost::math::normal(), alpha));
}

double z_alpha(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("z_alpha: alpha must be positive");
  return std::log(3.0 / alpha);
}

double pauli_concentration(double K) {
  if (!(K > 0.0)) throw std::invalid_argument("pauli_concentration: K must be positive");
  return 1.0 / ((16.0 + 8.0 / 3.0) * K * K);
}

double pauli_z_constant(double alpha, double K) {
  check_alpha(alpha, "pauli_z_constant");
  return std::log(6.0 / alpha) / pauli_concentration(K);
}

QuantileConstants QuantileConstants::for_rss(double alpha, double sigma, int n, bool pauli,
                                             ConstantsRegime regime) {
  check_alpha(alpha, "QuantileConstants");
  QuantileConstants q;
  q.alpha = alpha;
  q.regime = regime;
  q.z_alpha = lowrank_uq::z_alpha(alpha / 3.0);
  q.xi = xi_quantile(alpha / 3.0, sigma, n);
  q.z = pauli ? pauli_z_constant(alpha, 1.0) : 0.0;
  return q;
}

}  // namespace lowrank_uq
