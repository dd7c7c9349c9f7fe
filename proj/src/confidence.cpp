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

#include "lowrank_uq/confidence.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lowrank_uq {

std::string to_string(NormKind k) { return k == NormKind::Frobenius ? "frobenius" : "nuclear"; }

std::string to_string(Method m) {
  switch (m) {
    case Method::RSS: return "rss";
    case Method::UStat: return "ustat";
    case Method::ReAvg: return "reavg";
    case Method::PairedRSS: return "paired_rss";
    case Method::NuclearS1: return "nuclear_s1";
  }
  throw std::logic_error("unknown method");
}

double ConfidenceReport::radius() const { return std::sqrt(radius_sq); }

double ConfidenceReport::distance(const HermitianMatrix& v) const {
  const HermitianMatrix diff = v - center;
  return norm_kind == NormKind::Frobenius ? frobenius_norm(diff) : nuclear_norm(diff);
}

bool ConfidenceReport::contains(const HermitianMatrix& v) const {
  const double dist = distance(v);
  return dist * dist <= radius_sq;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_report_csv_header(std::ostream& os) {
  os << "method,norm_kind,alpha,n,d,statistic_value,radius_sq,covered,k_hat\n";
}

void write_report_csv_row(std::ostream& os, const ConfidenceReport& r,
                          std::optional<bool> covered) {
  os << to_string(r.method) << ',' << to_string(r.norm_kind) << ',' << format_double(r.level_alpha)
     << ',' << r.n << ',' << r.d << ',' << format_double(r.statistic_value) << ','
     << format_double(r.radius_sq) << ',';
  if (covered) os << (*covered ? 1 : 0);
  os << ',';
  if (r.k_hat) os << *r.k_hat;
  os << '\n';
}

}  // namespace lowrank_uq
