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
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lowrank_uq/constants.hpp"
#include "lowrank_uq/matrix.hpp"
#include "lowrank_uq/quantiles.hpp"
#include "lowrank_uq/sensing.hpp"

namespace lowrank_uq {

enum class EtaKind { RandomDirac, RandomPauli };

std::string to_string(EtaKind kind);
EtaKind parse_eta_kind(const std::string& s);

/// Random Dirac: √R on a uniformly chosen diagonal entry. Random Pauli: √R
/// times a uniformly chosen basis element. With real_only the Pauli draw is
/// restricted to real elements (an even number of σ_y factors), as required
/// by a real Gaussian design.
HermitianMatrix make_eta(EtaKind kind, double R, int d, Rng& rng, bool real_only = false);

/// Type-7 (linear interpolation) empirical quantile; p ∈ [0, 1].
double empirical_quantile(std::vector<double> v, double p);

/// Reading of a possibly negative statistic s inside the table formulas
/// s + c + C′s^{1/2}/√n: RootAbs keeps s in the linear term and takes √|s|;
/// Clamp replaces s by max(s, 0) in both places; Abs by |s| in both places.
enum class NegativeStat { RootAbs, Clamp, Abs };

std::string to_string(NegativeStat mode);
NegativeStat parse_negative_stat(const std::string& s);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; results must be written to index-addressed storage.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

struct ExperimentSpec {
  DesignKind design = DesignKind::GaussianIsotropic;
  EtaKind eta = EtaKind::RandomDirac;
  double R = 0.1;
  std::vector<int> n_grid{100, 200, 500, 1000, 2000, 5000};
  int reps = 1000;
  int d = 32;
  std::uint64_t seed = 1;
  ConstantsRegime regime = ConstantsRegime::Simulation;
  /// Level of the theory-regime sets.
  double alpha = 0.05;
  double C_UStat = 2.5;
  double Cprime_UStat = 6.0;
  double C_RSS = 1.0;
  double Cprime_RSS = 6.0;
  NegativeStat negative = NegativeStat::RootAbs;
  int threads = 1;

  /// Throws std::invalid_argument on reps < 1, an unsorted or empty n grid,
  /// n < 2, R ≤ 0, or a non-power-of-two d under Pauli design or Pauli η.
  void validate() const;
};

/// Per-replication statistics with center 0 and σ = 1.
struct ReplicationStats {
  double rss = 0.0;
  double ustat = 0.0;
};

/// Statistics of `spec.reps` replications at sample size n. Replication i
/// uses the seed derive_seed(spec.seed, {design, eta, R, n, i}), so the
/// result does not depend on the thread count.
std::vector<ReplicationStats> simulate_statistics(const ExperimentSpec& spec, int n);

/// Table-formula radii s + C·d/n + C′√s/√n and s + C/√n + C′√s/√n, with s read
/// through `negative`.
double ustat_table_radius_sq(double stat, int n, int d, double C, double C_prime,
                             NegativeStat negative = NegativeStat::RootAbs);
double rss_table_radius_sq(double stat, int n, double C, double C_prime,
                           NegativeStat negative = NegativeStat::RootAbs);

struct ResultRow {
  std::string method;  // "ustat" or "rss"
  DesignKind design = DesignKind::GaussianIsotropic;
  EtaKind eta = EtaKind::RandomDirac;
  double R = 0.0;
  int n = 0;
  int reps = 0;
  double coverage = 0.0;
  /// Mean of radius_sq, the quantity the tables call the diameter.
  double mean_diameter = 0.0;
  /// Median and 5%/95% quantiles of √|statistic − R|/√R.
  double median_norm_err = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};

/// Summary of one method at one n.
ResultRow summarize(const ExperimentSpec& spec, int n, const std::string& method,
                    const std::vector<double>& stats, const std::vector<double>& radius_sq);

/// Rows ordered by n, then U-Stat before RSS.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

void write_result_csv_header(std::ostream& os);
void write_result_csv_row(std::ostream& os, const ResultRow& row);

/// Top-level simulation config, "key=value" lines. Keys: design, eta, R,
/// n_grid (comma lists allowed), reps, d, seed, constants (theory or
/// simulation), alpha, threads, C_UStat, Cprime_UStat, C_RSS, Cprime_RSS,
/// negative_stat (root_abs, clamp or abs).
struct SimulationConfig {
  std::vector<DesignKind> designs{DesignKind::GaussianIsotropic, DesignKind::PauliBasis};
  std::vector<EtaKind> etas{EtaKind::RandomDirac, EtaKind::RandomPauli};
  std::vector<double> Rs{0.1, 1.0};
  ExperimentSpec base;

  std::vector<ExperimentSpec> specs() const;
};

SimulationConfig parse_simulation_config(std::istream& is);
SimulationConfig load_simulation_config(const std::string& path);
/// Applies LOWRANK_UQ_SEED when set; throws on a malformed value.
void apply_seed_override(std::uint64_t& seed);

/// File name of the per-cell CSV, e.g. "gaussian_dirac_R0.1.csv".
std::string cell_file_name(DesignKind design, EtaKind eta, double R);

/// Runs every (design, eta, R) cell, writes one CSV per cell and tables.csv
/// (coverage and diameter rows per method, one column per (R, n), two
/// decimals) into out_dir, and returns all rows.
std::vector<ResultRow> run_simulation(const SimulationConfig& cfg, const std::string& out_dir);

void write_tables_csv(std::ostream& os, const std::vector<ResultRow>& rows);

// Calibration.

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& name, double target, double best_value,
                   double best_coverage);
  double best_value() const { return best_value_; }
  double best_coverage() const { return best_coverage_; }

 private:
  double best_value_;
  double best_coverage_;
};

/// Grid lo, lo + step, … ≤ hi. A zero-width grid (lo == hi or step ≤ 0) is
/// the single point lo.
struct CalibrationGrid {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  std::vector<double> values() const;
  /// "lo:hi:step".
  static CalibrationGrid parse(const std::string& s);
};

/// Smallest grid value whose coverage reaches the target. coverage(c) must be
/// non-decreasing in c. Throws CalibrationError with the best achieved
/// coverage when no grid value qualifies.
double smallest_on_grid(const CalibrationGrid& grid, double target,
                        const std::function<double(double)>& coverage, const std::string& name);

struct CalibrationConfig {
  std::uint64_t seed = 7;
  int threads = 1;
  bool table = true;
  bool nuclear = true;
  double target = 0.95;

  /// Table-formula fixture (pooled over its R values and n grid).
  ExperimentSpec table_fixture;
  std::vector<double> table_Rs{0.1, 1.0};
  CalibrationGrid grid_C_UStat{0.5, 8.0, 0.1};
  CalibrationGrid grid_C_RSS{0.1, 8.0, 0.1};

  /// Pilot and nuclear-set fixture: rank-k states, Gaussian noise σ.
  DesignKind nuclear_design = DesignKind::PauliBasis;
  int nuclear_d = 16;
  int nuclear_k = 2;
  double nuclear_sigma = 1.0;
  int nuclear_n = 8192;
  int nuclear_reps = 200;
  double delta = 0.1;
  double lambda_scale = 1.0;
  /// Target of the eigenvalue partial-sum bound.
  double cv_target = 0.97;
  CalibrationGrid grid_c_v{0.01, 2.0, 0.01};
  CalibrationGrid grid_C_nuclear{0.1, 10.0, 0.05};
};

CalibrationConfig parse_calibration_config(std::istream& is);
CalibrationConfig load_calibration_config(const std::string& path);

/// Per-replication record of the nuclear fixture.
struct NuclearReplication {
  /// n‖θ̃ − θ‖²_F/(σ²kd).
  double pilot_ratio = 0.0;
  /// Smallest c_v for which the partial-sum bound holds.
  double needed_c_v = 0.0;
  /// Smallest C for which the set covers θ, given D.
  double needed_C = 0.0;
  int k_hat = 0;
};

/// Runs the nuclear fixture of `cfg` with pilot constant D and the given seed.
/// D only affects needed_C and k_hat.
std::vector<NuclearReplication> nuclear_replications(const CalibrationConfig& cfg, double D,
                                                     std::uint64_t seed);

/// Empirical 1 − 2δ/3 quantile of the pilot ratios.
double pilot_D_from(const std::vector<NuclearReplication>& reps, double delta);

/// Grid-searches the constants selected in cfg and returns them on top of
/// Constants::defaults(). Writes scoped D entries for the nuclear design.
Constants calibrate(const CalibrationConfig& cfg);

}  // namespace lowrank_uq
