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
#include <map>
#include <string>

#include "lowrank_uq/sensing.hpp"

namespace lowrank_uq {

/// Key=value store of calibrated constants. Lines are "key=value"; blank
/// lines and lines starting with '#' are ignored. Keys are written sorted so
/// the file is deterministic.
class Constants {
 public:
  /// Table-formula constants and the pilot defaults.
  static Constants defaults();
  static Constants read(std::istream& is);
  static Constants load(const std::string& path);
  void write(std::ostream& os) const;
  void save(const std::string& path) const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double get(const std::string& key, double fallback) const;
  void set(const std::string& key, double value) { values_[key] = value; }
  const std::map<std::string, double>& values() const { return values_; }

  /// "<base>.<design>.<sigma>", e.g. "D.pauli.1".
  static std::string scoped_key(const std::string& base, DesignKind design, double sigma);
  /// Scoped value when present, else the plain key, else the fallback.
  double get_scoped(const std::string& base, DesignKind design, double sigma,
                    double fallback) const;

 private:
  std::map<std::string, double> values_;
};

}  // namespace lowrank_uq
