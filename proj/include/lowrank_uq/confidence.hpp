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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lowrank_uq/matrix.hpp"

namespace lowrank_uq {

enum class NormKind { Frobenius, Nuclear };
enum class Method { RSS, UStat, ReAvg, PairedRSS, NuclearS1 };

std::string to_string(NormKind k);
std::string to_string(Method m);

/// A ball {v : ‖v − center‖² ≤ radius_sq} in the Frobenius or nuclear norm.
struct ConfidenceReport {
  HermitianMatrix center;
  double radius_sq = 0.0;
  NormKind norm_kind = NormKind::Frobenius;
  double level_alpha = 0.05;
  Method method = Method::RSS;
  double statistic_value = 0.0;
  int n = 0;
  int d = 0;
  std::optional<int> k_hat;
  /// Regime diagnostics (never fatal).
  std::vector<std::string> warnings;

  double radius() const;
  double distance(const HermitianMatrix& v) const;
  bool contains(const HermitianMatrix& v) const;
};

/// Columns: method,norm_kind,alpha,n,d,statistic_value,radius_sq,covered,k_hat.
/// `covered` and `k_hat` are left empty when unknown.
void write_report_csv_header(std::ostream& os);
void write_report_csv_row(std::ostream& os, const ConfidenceReport& r,
                          std::optional<bool> covered = std::nullopt);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace lowrank_uq
