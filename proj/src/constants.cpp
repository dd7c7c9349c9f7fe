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


#include "lowrank_uq/constants.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lowrank_uq/confidence.hpp"

namespace lowrank_uq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Constants Constants::defaults() {
  Constants c;
  c.set("C_UStat", 2.5);
  c.set("Cprime_UStat", 6.0);
  c.set("C_RSS", 1.0);
  c.set("Cprime_RSS", 6.0);
  c.set("lambda_scale", 1.0);
  c.set("D", 1.0);
  c.set("c_v", 1.0);
  c.set("C_nuclear", 2.0);
  return c;
}

Constants Constants::read(std::istream& is) {
  Constants c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("constants: line " + std::to_string(lineno) + ": missing '='");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("constants: line " + std::to_string(lineno) + ": empty key");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size())
      throw std::invalid_argument("constants: line " + std::to_string(lineno) +
                                  ": value is not a number: '" + val + "'");
    c.set(key, v);
  }
  return c;
}

Constants Constants::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("constants: cannot open " + path);
  return read(in);
}

void Constants::write(std::ostream& os) const {
  for (const auto& [k, v] : values_) os << k << '=' << format_double(v) << '\n';
}

void Constants::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("constants: cannot write " + path);
  write(out);
}

double Constants::get(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Constants::scoped_key(const std::string& base, DesignKind design, double sigma) {
  return base + "." + to_string(design) + "." + format_double(sigma);
}

double Constants::get_scoped(const std::string& base, DesignKind design, double sigma,
                             double fallback) const {
  const auto it = values_.find(scoped_key(base, design, sigma));
  if (it != values_.end()) return it->second;
  return get(base, fallback);
}

}  // namespace lowrank_uq
