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


#include "lowrank_uq/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include "lowrank_uq/confidence.hpp"
#include "lowrank_uq/measurement.hpp"
#include "lowrank_uq/recovery.hpp"
#include "lowrank_uq/uq_frobenius.hpp"
#include "lowrank_uq/uq_nuclear.hpp"

namespace lowrank_uq {

namespace {

bool is_power_of_two(int d) { return d >= 1 && (d & (d - 1)) == 0; }

int qubits_of(int d) { return std::countr_zero(static_cast<unsigned>(d)); }

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("config: empty list '" + s + "'");
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw std::invalid_argument("config: " + key + ": not a number: '" + s + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw std::invalid_argument("config: " + key + ": not an integer: '" + s + "'");
  return v;
}

std::uint64_t to_seed(const std::string& key, const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s[0] == '-')
    throw std::invalid_argument("config: " + key + ": not a seed: '" + s + "'");
  return v;
}

std::vector<int> to_int_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(static_cast<int>(to_integer(key, item)));
  return out;
}

std::vector<double> to_double_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(to_double(key, item));
  return out;
}

/// Ordered key=value pairs; later duplicates override earlier ones.
std::map<std::string, std::string> read_pairs(std::istream& is, const std::string& what) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(what + ": line " + std::to_string(lineno) + ": missing '='");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument(what + ": line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

/// Applies a key shared by ExperimentSpec-based configs; false if unknown.
bool apply_spec_key(ExperimentSpec& s, const std::string& key, const std::string& val) {
  if (key == "n_grid") {
    s.n_grid = to_int_list(key, val);
  } else if (key == "reps") {
    s.reps = static_cast<int>(to_integer(key, val));
  } else if (key == "d") {
    s.d = static_cast<int>(to_integer(key, val));
  } else if (key == "seed") {
    s.seed = to_seed(key, val);
  } else if (key == "constants") {
    s.regime = parse_regime(val);
  } else if (key == "alpha") {
    s.alpha = to_double(key, val);
  } else if (key == "threads") {
    s.threads = static_cast<int>(to_integer(key, val));
  } else if (key == "C_UStat") {
    s.C_UStat = to_double(key, val);
  } else if (key == "Cprime_UStat") {
    s.Cprime_UStat = to_double(key, val);
  } else if (key == "C_RSS") {
    s.C_RSS = to_double(key, val);
  } else if (key == "Cprime_RSS") {
    s.Cprime_RSS = to_double(key, val);
  } else if (key == "negative_stat") {
    s.negative = parse_negative_stat(val);
  } else {
    return false;
  }
  return true;
}

std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::string to_string(EtaKind kind) {
  return kind == EtaKind::RandomDirac ? "dirac" : "pauli";
}

EtaKind parse_eta_kind(const std::string& s) {
  if (s == "dirac") return EtaKind::RandomDirac;
  if (s == "pauli") return EtaKind::RandomPauli;
  throw std::invalid_argument("unknown eta kind '" + s + "'");
}

HermitianMatrix make_eta(EtaKind kind, double R, int d, Rng& rng, bool real_only) {
  if (!(R >= 0.0)) throw std::invalid_argument("make_eta: R must be nonnegative");
  if (d < 1) throw std::invalid_argument("make_eta: dimension must be positive");
  const double amp = std::sqrt(R);
  if (kind == EtaKind::RandomDirac) {
    RVec diag = RVec::Zero(d);
    diag[std::uniform_int_distribution<int>(0, d - 1)(rng)] = amp;
    return HermitianMatrix::diagonal(diag);
  }
  if (!is_power_of_two(d) || d < 2)
    throw std::invalid_argument("make_eta: random Pauli eta needs d a power of two, d >= 2");
  const int qubits = qubits_of(d);
  const auto basis = PauliBasis::get(qubits);
  std::uniform_int_distribution<std::uint32_t> pick(0, basis->size() - 1);
  for (;;) {
    const std::uint32_t idx = pick(rng);
    if (real_only) {
      int y_count = 0;
      for (std::uint32_t rest = idx; rest > 0; rest /= 4) y_count += (rest % 4 == 2);
      if (y_count % 2 != 0) continue;
    }
    HermitianMatrix eta = (*basis)[idx].dense();
    if (real_only) eta = HermitianMatrix(Eigen::MatrixXd(eta.mat().real()));
    return amp * eta;
  }
}

double empirical_quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("empirical_quantile: p outside [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = p * (v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void ExperimentSpec::validate() const {
  if (reps < 1) throw std::invalid_argument("ExperimentSpec: reps must be >= 1");
  if (n_grid.empty()) throw std::invalid_argument("ExperimentSpec: empty n grid");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()))
    throw std::invalid_argument("ExperimentSpec: n grid must be sorted ascending");
  if (n_grid.front() < 2) throw std::invalid_argument("ExperimentSpec: n must be >= 2");
  if (!(R > 0.0)) throw std::invalid_argument("ExperimentSpec: R must be positive");
  if (d < 1) throw std::invalid_argument("ExperimentSpec: d must be positive");
  if ((design == DesignKind::PauliBasis || eta == EtaKind::RandomPauli) &&
      (!is_power_of_two(d) || d < 2))
    throw std::invalid_argument("ExperimentSpec: Pauli design or eta needs d a power of two");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ExperimentSpec: alpha outside (0, 1)");
}

std::vector<ReplicationStats> simulate_statistics(const ExperimentSpec& spec, int n) {
  spec.validate();
  const DesignEnsemble ens = DesignEnsemble::make(spec.design, spec.d);
  const bool real_only = spec.design == DesignKind::GaussianIsotropic;
  const HermitianMatrix zero = HermitianMatrix::zero(spec.d);
  std::vector<ReplicationStats> out(spec.reps);
  parallel_for(spec.reps, spec.threads, [&](int i) {
    Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(spec.design),
                                    static_cast<std::uint64_t>(spec.eta), bits(spec.R),
                                    static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i)}));
    const HermitianMatrix eta = make_eta(spec.eta, spec.R, spec.d, rng, real_only);
    const SensingPlan plan = draw_plan(ens, n, rng);
    const MeasurementBatch batch = measure_gaussian(plan, eta, 1.0, rng);
    out[i].rss = rss_statistic(batch, zero, 1.0);
    out[i].ustat = ustat_statistic(batch, zero);
  });
  return out;
}

std::string to_string(NegativeStat mode) {
  switch (mode) {
    case NegativeStat::Clamp:
      return "clamp";
    case NegativeStat::Abs:
      return "abs";
    default:
      return "root_abs";
  }
}

NegativeStat parse_negative_stat(const std::string& s) {
  if (s == "root_abs") return NegativeStat::RootAbs;
  if (s == "abs") return NegativeStat::Abs;
  if (s == "clamp") return NegativeStat::Clamp;
  throw std::invalid_argument("unknown negative_stat '" + s + "'");
}

namespace {

/// (linear term, root term) of the table formulas.
std::pair<double, double> read_stat(double stat, NegativeStat negative) {
  switch (negative) {
    case NegativeStat::Clamp:
      return {std::max(stat, 0.0), std::sqrt(std::max(stat, 0.0))};
    case NegativeStat::Abs:
      return {std::abs(stat), std::sqrt(std::abs(stat))};
    default:
      return {stat, std::sqrt(std::abs(stat))};
  }
}

}  // namespace

double ustat_table_radius_sq(double stat, int n, int d, double C, double C_prime,
                             NegativeStat negative) {
  const auto [lin, root] = read_stat(stat, negative);
  return lin + C * d / n + C_prime * root / std::sqrt(double(n));
}

double rss_table_radius_sq(double stat, int n, double C, double C_prime, NegativeStat negative) {
  const auto [lin, root] = read_stat(stat, negative);
  return lin + C / std::sqrt(double(n)) + C_prime * root / std::sqrt(double(n));
}

ResultRow summarize(const ExperimentSpec& spec, int n, const std::string& method,
                    const std::vector<double>& stats, const std::vector<double>& radius_sq) {
  if (stats.empty() || stats.size() != radius_sq.size())
    throw std::invalid_argument("summarize: statistic and radius counts differ or are empty");
  ResultRow row;
  row.method = method;
  row.design = spec.design;
  row.eta = spec.eta;
  row.R = spec.R;
  row.n = n;
  row.reps = static_cast<int>(stats.size());
  std::vector<double> err(stats.size());
  int covered = 0;
  double diam = 0.0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    covered += spec.R <= radius_sq[i];
    diam += radius_sq[i];
    err[i] = std::sqrt(std::abs(stats[i] - spec.R)) / std::sqrt(spec.R);
  }
  row.coverage = double(covered) / row.reps;
  row.mean_diameter = diam / row.reps;
  row.median_norm_err = empirical_quantile(err, 0.5);
  row.q05 = empirical_quantile(err, 0.05);
  row.q95 = empirical_quantile(err, 0.95);
  return row;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<ResultRow> rows;
  const bool theory = spec.regime == ConstantsRegime::Theory;
  for (int n : spec.n_grid) {
    const auto reps = simulate_statistics(spec, n);
    std::vector<double> us, rs, ur, rr;
    RssOptions ropts;
    ropts.mode = RssMode::ImplicitSolve;
    ropts.regime = ConstantsRegime::Theory;
    ropts.z = QuantileConstants::for_rss(spec.alpha, 1.0, n,
                                         spec.design == DesignKind::PauliBasis).z;
    const UStatConstants uc = UStatConstants::from_level(spec.alpha, 1.0, spec.d, n);
    for (const auto& r : reps) {
      us.push_back(r.ustat);
      rs.push_back(r.rss);
      if (theory) {
        ur.push_back(ustat_radius_sq(r.ustat, n, spec.d, uc));
        rr.push_back(rss_radius_sq(r.rss, n, spec.d, 1.0, spec.alpha, ropts));
      } else {
        ur.push_back(ustat_table_radius_sq(r.ustat, n, spec.d, spec.C_UStat, spec.Cprime_UStat,
                                           spec.negative));
        rr.push_back(rss_table_radius_sq(r.rss, n, spec.C_RSS, spec.Cprime_RSS, spec.negative));
      }
    }
    rows.push_back(summarize(spec, n, "ustat", us, ur));
    rows.push_back(summarize(spec, n, "rss", rs, rr));
  }
  return rows;
}

void write_result_csv_header(std::ostream& os) {
  os << "design,eta,R,method,n,reps,coverage,mean_diameter,median_norm_err,q05,q95\n";
}

void write_result_csv_row(std::ostream& os, const ResultRow& r) {
  os << to_string(r.design) << ',' << to_string(r.eta) << ',' << format_double(r.R) << ','
     << r.method << ',' << r.n << ',' << r.reps << ',' << format_double(r.coverage) << ','
     << format_double(r.mean_diameter) << ',' << format_double(r.median_norm_err) << ','
     << format_double(r.q05) << ',' << format_double(r.q95) << '\n';
}

std::vector<ExperimentSpec> SimulationConfig::specs() const {
  std::vector<ExperimentSpec> out;
  for (DesignKind design : designs)
    for (EtaKind eta : etas)
      for (double R : Rs) {
        ExperimentSpec s = base;
        s.design = design;
        s.eta = eta;
        s.R = R;
        s.validate();
        out.push_back(s);
      }
  return out;
}

SimulationConfig parse_simulation_config(std::istream& is) {
  SimulationConfig cfg;
  for (const auto& [key, val] : read_pairs(is, "simulation config")) {
    if (key == "design") {
      cfg.designs.clear();
      for (const auto& s : split_list(val)) cfg.designs.push_back(parse_design_kind(s));
    } else if (key == "eta") {
      cfg.etas.clear();
      for (const auto& s : split_list(val)) cfg.etas.push_back(parse_eta_kind(s));
    } else if (key == "R") {
      cfg.Rs = to_double_list(key, val);
    } else if (!apply_spec_key(cfg.base, key, val)) {
      throw std::invalid_argument("simulation config: unknown key '" + key + "'");
    }
  }
  cfg.specs();  // validates every cell
  return cfg;
}

SimulationConfig load_simulation_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_simulation_config(in);
}

void apply_seed_override(std::uint64_t& seed) {
  const char* env = std::getenv("LOWRANK_UQ_SEED");
  if (env != nullptr && *env != '\0') seed = to_seed("LOWRANK_UQ_SEED", env);
}

std::string cell_file_name(DesignKind design, EtaKind eta, double R) {
  return to_string(design) + "_" + to_string(eta) + "_R" + format_double(R) + ".csv";
}

std::vector<ResultRow> run_simulation(const SimulationConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<ResultRow> all;
  for (const ExperimentSpec& spec : cfg.specs()) {
    const auto rows = run_experiment(spec);
    const fs::path path = fs::path(out_dir) / cell_file_name(spec.design, spec.eta, spec.R);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_result_csv_header(out);
    for (const auto& r : rows) write_result_csv_row(out, r);
    if (!out) throw std::runtime_error("write failed: " + path.string());
    all.insert(all.end(), rows.begin(), rows.end());
  }
  const fs::path tables = fs::path(out_dir) / "tables.csv";
  std::ofstream out(tables);
  if (!out) throw std::runtime_error("cannot write " + tables.string());
  write_tables_csv(out, all);
  if (!out) throw std::runtime_error("write failed: " + tables.string());
  return all;
}

void write_tables_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  // Column order: R ascending, then n ascending.
  std::vector<std::pair<double, int>> cols;
  std::vector<std::pair<int, int>> groups;  // (design, eta) in first-seen order
  for (const auto& r : rows) {
    const std::pair<double, int> c{r.R, r.n};
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    const std::pair<int, int> g{static_cast<int>(r.design), static_cast<int>(r.eta)};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  std::sort(cols.begin(), cols.end());
  os << "design,eta,quantity";
  for (const auto& [R, n] : cols) os << ",R=" << format_double(R) << " n=" << n;
  os << '\n';
  struct Quantity {
    const char* label;
    const char* method;
    bool coverage;
  };
  const Quantity quantities[] = {{"Coverage U-Stat", "ustat", true},
                                 {"Diameter U-Stat", "ustat", false},
                                 {"Coverage RSS", "rss", true},
                                 {"Diameter RSS", "rss", false}};
  for (const auto& [design, eta] : groups) {
    for (const Quantity& q : quantities) {
      os << to_string(static_cast<DesignKind>(design)) << ','
         << to_string(static_cast<EtaKind>(eta)) << ',' << q.label;
      for (const auto& [R, n] : cols) {
        os << ',';
        for (const auto& r : rows)
          if (static_cast<int>(r.design) == design && static_cast<int>(r.eta) == eta &&
              r.R == R && r.n == n && r.method == q.method) {
            os << fixed2(q.coverage ? r.coverage : r.mean_diameter);
            break;
          }
      }
      os << '\n';
    }
  }
}

// Calibration.

CalibrationError::CalibrationError(const std::string& name, double target, double best_value,
                                   double best_coverage)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "calibration of " << name << ": target coverage " << target
            << " unreachable within the grid; best achieved coverage " << best_coverage
            << " at " << name << " = " << best_value;
        return msg.str();
      }()),
      best_value_(best_value),
      best_coverage_(best_coverage) {}

std::vector<double> CalibrationGrid::values() const {
  if (!(step > 0.0) || hi <= lo) return {lo};
  std::vector<double> v;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  // Rounded to 12 significant digits so 0.1-steps print as written.
  for (long i = 0; i <= count; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", lo + i * step);
    v.push_back(std::strtod(buf, nullptr));
  }
  return v;
}

CalibrationGrid CalibrationGrid::parse(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 3) throw std::invalid_argument("grid '" + s + "': expected lo:hi:step");
  CalibrationGrid g{to_double("grid", parts[0]), to_double("grid", parts[1]),
                    to_double("grid", parts[2])};
  if (g.hi < g.lo) throw std::invalid_argument("grid '" + s + "': hi < lo");
  return g;
}

double smallest_on_grid(const CalibrationGrid& grid, double target,
                        const std::function<double(double)>& coverage, const std::string& name) {
  double best_value = grid.lo;
  double best_cov = -1.0;
  for (double c : grid.values()) {
    const double cov = coverage(c);
    if (cov >= target) return c;
    if (cov > best_cov) {
      best_cov = cov;
      best_value = c;
    }
  }
  throw CalibrationError(name, target, best_value, best_cov);
}

CalibrationConfig parse_calibration_config(std::istream& is) {
  CalibrationConfig cfg;
  ExperimentSpec& t = cfg.table_fixture;
  for (const auto& [key, val] : read_pairs(is, "calibration config")) {
    if (key == "seed") {
      cfg.seed = to_seed(key, val);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(to_integer(key, val));
    } else if (key == "targets") {
      cfg.table = cfg.nuclear = false;
      for (const auto& s : split_list(val)) {
        if (s == "table") {
          cfg.table = true;
        } else if (s == "nuclear") {
          cfg.nuclear = true;
        } else {
          throw std::invalid_argument("calibration config: unknown target '" + s + "'");
        }
      }
    } else if (key == "target") {
      cfg.target = to_double(key, val);
    } else if (key == "design") {
      t.design = parse_design_kind(val);
    } else if (key == "eta") {
      t.eta = parse_eta_kind(val);
    } else if (key == "R") {
      cfg.table_Rs = to_double_list(key, val);
    } else if (key == "n_grid" || key == "reps" || key == "d" || key == "negative_stat") {
      apply_spec_key(t, key, val);
    } else if (key == "grid_C_UStat") {
      cfg.grid_C_UStat = CalibrationGrid::parse(val);
    } else if (key == "grid_C_RSS") {
      cfg.grid_C_RSS = CalibrationGrid::parse(val);
    } else if (key == "nuclear_design") {
      cfg.nuclear_design = parse_design_kind(val);
    } else if (key == "nuclear_d") {
      cfg.nuclear_d = static_cast<int>(to_integer(key, val));
    } else if (key == "nuclear_k") {
      cfg.nuclear_k = static_cast<int>(to_integer(key, val));
    } else if (key == "nuclear_sigma") {
      cfg.nuclear_sigma = to_double(key, val);
    } else if (key == "nuclear_n") {
      cfg.nuclear_n = static_cast<int>(to_integer(key, val));
    } else if (key == "nuclear_reps") {
      cfg.nuclear_reps = static_cast<int>(to_integer(key, val));
    } else if (key == "delta") {
      cfg.delta = to_double(key, val);
    } else if (key == "lambda_scale") {
      cfg.lambda_scale = to_double(key, val);
    } else if (key == "cv_target") {
      cfg.cv_target = to_double(key, val);
    } else if (key == "grid_c_v") {
      cfg.grid_c_v = CalibrationGrid::parse(val);
    } else if (key == "grid_C_nuclear") {
      cfg.grid_C_nuclear = CalibrationGrid::parse(val);
    } else {
      throw std::invalid_argument("calibration config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

CalibrationConfig load_calibration_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_calibration_config(in);
}

namespace {

struct NuclearDraw {
  HermitianMatrix theta;
  RVec true_eigs;
  HermitianMatrix pilot;
  EigenvalueEstimate est;
  double pilot_ratio = 0.0;
};

void check_nuclear(const CalibrationConfig& cfg) {
  if (cfg.nuclear_reps < 1) throw std::invalid_argument("calibration: nuclear_reps must be >= 1");
  if (cfg.nuclear_k < 1 || cfg.nuclear_k > cfg.nuclear_d)
    throw std::invalid_argument("calibration: nuclear_k outside [1, d]");
  if (!(cfg.nuclear_sigma > 0.0))
    throw std::invalid_argument("calibration: nuclear_sigma must be positive");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw std::invalid_argument("calibration: delta outside (0, 1)");
}

std::vector<NuclearDraw> nuclear_draws(const CalibrationConfig& cfg, std::uint64_t seed) {
  check_nuclear(cfg);
  const DesignEnsemble ens = DesignEnsemble::make(cfg.nuclear_design, cfg.nuclear_d);
  const int d = cfg.nuclear_d, n = cfg.nuclear_n, k = cfg.nuclear_k;
  const double sigma = cfg.nuclear_sigma;
  PilotConfig pcfg;
  pcfg.lambda_scale = cfg.lambda_scale;
  std::vector<NuclearDraw> out(cfg.nuclear_reps);
  parallel_for(cfg.nuclear_reps, cfg.threads, [&](int i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(cfg.nuclear_design),
                               static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(k),
                               bits(sigma), static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(i)}));
    RandomStateOptions sopts;
    sopts.real = cfg.nuclear_design == DesignKind::GaussianIsotropic;
    NuclearDraw& r = out[i];
    r.theta = random_rank_k_state(d, k, rng, sopts).matrix();
    r.true_eigs = eigh(r.theta).eigenvalues;
    const auto first = measure_gaussian(draw_plan(ens, n, rng), r.theta, sigma, rng);
    const auto second = measure_gaussian(draw_plan(ens, n, rng), r.theta, sigma, rng);
    r.pilot = pilot_estimate(first, pcfg);
    NuclearSetConfig ncfg;
    ncfg.rate = RateFunction{1.0, sigma, d, n};
    r.est = eigenvalue_estimator(second, r.pilot, ncfg);
    const double err = frobenius_norm(r.pilot - r.theta);
    r.pilot_ratio = n * err * err / (sigma * sigma * k * d);
  });
  return out;
}

NuclearReplication evaluate_draw(const NuclearDraw& r, const CalibrationConfig& cfg, double D) {
  NuclearSetConfig ncfg;
  ncfg.C = 1.0;
  ncfg.c_v = 1.0;
  ncfg.rate = RateFunction{D, cfg.nuclear_sigma, cfg.nuclear_d, cfg.nuclear_n};
  NuclearReplication out;
  out.pilot_ratio = r.pilot_ratio;
  const double unit_v = eigen_deviation_scale(ncfg);
  double s_hat = 0.0, s_true = 0.0;
  for (int j = 0; j < cfg.nuclear_d; ++j) {
    s_hat += r.est.lambdas[j];
    s_true += r.true_eigs[j];
    out.needed_c_v = std::max(out.needed_c_v, std::abs(s_hat - s_true) / (2.0 * (j + 1) * unit_v));
  }
  const ConfidenceReport rep = nuclear_confidence_set(r.pilot, r.est, ncfg);
  out.k_hat = *rep.k_hat;
  out.needed_C = rep.distance(r.theta) / rep.radius();
  return out;
}

}  // namespace

std::vector<NuclearReplication> nuclear_replications(const CalibrationConfig& cfg, double D,
                                                     std::uint64_t seed) {
  if (!(D > 0.0)) throw std::invalid_argument("nuclear_replications: D must be positive");
  std::vector<NuclearReplication> out;
  for (const auto& r : nuclear_draws(cfg, seed)) out.push_back(evaluate_draw(r, cfg, D));
  return out;
}

double pilot_D_from(const std::vector<NuclearReplication>& reps, double delta) {
  std::vector<double> ratios;
  for (const auto& r : reps) ratios.push_back(r.pilot_ratio);
  return empirical_quantile(ratios, 1.0 - 2.0 * delta / 3.0);
}

Constants calibrate(const CalibrationConfig& cfg) {
  Constants c = Constants::defaults();
  c.set("lambda_scale", cfg.lambda_scale);
  if (cfg.table) {
    // Pooled coverage over the fixture's (R, n) cells.
    struct Cell {
      double R;
      int n;
      std::vector<ReplicationStats> stats;
    };
    std::vector<Cell> cells;
    for (double R : cfg.table_Rs) {
      ExperimentSpec s = cfg.table_fixture;
      s.R = R;
      s.seed = cfg.seed;
      s.threads = cfg.threads;
      for (int n : s.n_grid) cells.push_back({R, n, simulate_statistics(s, n)});
    }
    const int d = cfg.table_fixture.d;
    const double cpu = cfg.table_fixture.Cprime_UStat;
    const double cpr = cfg.table_fixture.Cprime_RSS;
    const NegativeStat neg = cfg.table_fixture.negative;
    auto pooled = [&](auto&& covered) {
      long hit = 0, total = 0;
      for (const Cell& cell : cells)
        for (const auto& r : cell.stats) {
          hit += covered(cell, r);
          ++total;
        }
      return double(hit) / total;
    };
    c.set("C_UStat", smallest_on_grid(cfg.grid_C_UStat, cfg.target, [&](double C) {
      return pooled([&](const Cell& cell, const ReplicationStats& r) {
        return cell.R <= ustat_table_radius_sq(r.ustat, cell.n, d, C, cpu, neg);
      });
    }, "C_UStat"));
    c.set("C_RSS", smallest_on_grid(cfg.grid_C_RSS, cfg.target, [&](double C) {
      return pooled([&](const Cell& cell, const ReplicationStats& r) {
        return cell.R <= rss_table_radius_sq(r.rss, cell.n, C, cpr, neg);
      });
    }, "C_RSS"));
    c.set("Cprime_UStat", cpu);
    c.set("Cprime_RSS", cpr);
  }
  if (cfg.nuclear) {
    const auto draws = nuclear_draws(cfg, derive_seed(cfg.seed, {0x6e75636cULL}));
    std::vector<double> ratios;
    for (const auto& r : draws) ratios.push_back(r.pilot_ratio);
    const double D = empirical_quantile(ratios, 1.0 - 2.0 * cfg.delta / 3.0);
    std::vector<NuclearReplication> reps;
    for (const auto& r : draws) reps.push_back(evaluate_draw(r, cfg, D));
    auto fraction = [&](auto&& ok) {
      return double(std::count_if(reps.begin(), reps.end(), ok)) / reps.size();
    };
    const double c_v = smallest_on_grid(cfg.grid_c_v, cfg.cv_target, [&](double cv) {
      return fraction([&](const NuclearReplication& r) { return r.needed_c_v <= cv; });
    }, "c_v");
    const double C = smallest_on_grid(cfg.grid_C_nuclear, 1.0 - cfg.delta, [&](double Cn) {
      return fraction([&](const NuclearReplication& r) { return r.needed_C <= Cn; });
    }, "C_nuclear");
    c.set("D", D);
    c.set(Constants::scoped_key("D", cfg.nuclear_design, cfg.nuclear_sigma), D);
    c.set("c_v", c_v);
    c.set("C_nuclear", C);
  }
  return c;
}

}  // namespace lowrank_uq
