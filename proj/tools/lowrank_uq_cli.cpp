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


// lowrank-uq: simulate, certify and calibrate from the command line.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lowrank_uq/certify.hpp"
#include "lowrank_uq/constants.hpp"
#include "lowrank_uq/simlab.hpp"

namespace {

using namespace lowrank_uq;
using nlohmann::ordered_json;

int cmd_simulate(const std::string& config_path, const std::string& out_dir, int threads) {
  SimulationConfig cfg = load_simulation_config(config_path);
  apply_seed_override(cfg.base.seed);
  if (threads > 0) cfg.base.threads = threads;
  const auto rows = run_simulation(cfg, out_dir);
  const std::size_t expected = cfg.specs().size() * cfg.base.n_grid.size() * 2;
  std::cerr << "simulate: " << rows.size() << " rows written to " << out_dir << '\n';
  return rows.size() == expected ? 0 : 1;
}

ordered_json matrix_json(const HermitianMatrix& m) {
  ordered_json re = ordered_json::array(), im = ordered_json::array();
  for (int r = 0; r < m.dim(); ++r) {
    ordered_json rr = ordered_json::array(), ri = ordered_json::array();
    for (int c = 0; c < m.dim(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

struct CertifyArgs {
  int d = 4;
  int rank = 1;
  double sigma = 0.05;
  double eps = 0.5;
  double delta = 0.1;
  std::string design = "pauli";
  std::string noise = "gaussian";
  std::string constants = "simulation";
  std::string constants_file;
  std::string log = "certify_epochs.csv";
  std::uint64_t seed = 1;
};

int cmd_certify(CertifyArgs a) {
  apply_seed_override(a.seed);
  const DesignKind design = parse_design_kind(a.design);
  CertificateConfig cfg;
  cfg.epsilon = a.eps;
  cfg.delta = a.delta;
  cfg.ensemble = DesignEnsemble::make(design, a.d);
  cfg.noise = a.noise == "gaussian" ? NoiseModel::gaussian(a.sigma) : NoiseModel::parse(a.noise);
  cfg.conf_constants = parse_regime(a.constants);
  if (!a.constants_file.empty()) {
    const Constants c = Constants::load(a.constants_file);
    cfg.table_C = c.get("C_RSS", cfg.table_C);
    cfg.table_C_prime = c.get("Cprime_RSS", cfg.table_C_prime);
    cfg.ustat_C = c.get("C_UStat", cfg.ustat_C);
    cfg.ustat_C_prime = c.get("Cprime_UStat", cfg.ustat_C_prime);
    cfg.pilot.lambda_scale = c.get("lambda_scale", cfg.pilot.lambda_scale);
  }
  if (a.rank < 1 || a.rank > a.d) throw std::invalid_argument("certify: rank outside [1, d]");

  Rng rng(derive_seed(a.seed, {0x63657274ULL}));
  RandomStateOptions sopts;
  sopts.real = design == DesignKind::GaussianIsotropic;
  const QuantumState theta = random_rank_k_state(a.d, a.rank, rng, sopts);
  const Certificate cert = run_certificate(theta, cfg, rng);
  const double err = frobenius_norm(cert.theta_hat.matrix() - theta.matrix());

  ordered_json j;
  j["d"] = a.d;
  j["rank"] = a.rank;
  j["design"] = a.design;
  j["noise"] = cfg.noise.describe();
  j["constants"] = a.constants;
  j["seed"] = a.seed;
  j["epsilon"] = cert.epsilon;
  j["delta"] = cert.delta;
  j["T"] = cert.T;
  j["alpha"] = cert.alpha;
  j["stopped"] = cert.stopped;
  j["n_hat"] = cert.n_hat;
  j["error_frobenius"] = err;
  j["within_epsilon"] = err <= cert.epsilon;
  ordered_json epochs = ordered_json::array();
  for (const EpochRecord& e : cert.epoch_log)
    epochs.push_back({{"m", e.m},
                      {"budget", e.budget},
                      {"method", to_string(e.method)},
                      {"statistic", e.statistic},
                      {"radius_sq", e.radius_sq},
                      {"radius", e.radius}});
  j["epochs"] = epochs;
  j["theta_hat"] = matrix_json(cert.theta_hat.matrix());
  std::cout << j.dump() << '\n';

  if (!a.log.empty()) {
    const bool fresh = !std::filesystem::exists(a.log) || std::filesystem::file_size(a.log) == 0;
    std::ofstream out(a.log, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + a.log);
    write_epoch_log_csv(out, cert, fresh);
  }
  return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& out_path, int threads) {
  CalibrationConfig cfg = load_calibration_config(config_path);
  apply_seed_override(cfg.seed);
  if (threads > 0) cfg.threads = threads;
  try {
    const Constants c = calibrate(cfg);
    if (out_path.empty() || out_path == "-") {
      c.write(std::cout);
    } else {
      c.save(out_path);
    }
  } catch (const CalibrationError& e) {
    std::cerr << "calibrate: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank matrix recovery with confidence sets and stopping certificates"};
  app.require_subcommand(1);

  std::string sim_config, sim_out = "results";
  int sim_threads = 0;
  auto* sim = app.add_subcommand("simulate", "Run the coverage and diameter experiments");
  sim->add_option("--config", sim_config, "key=value experiment config")->required()
      ->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "Output directory");
  sim->add_option("--threads", sim_threads, "Worker threads (0 keeps the config value)");

  CertifyArgs ca;
  auto* cert = app.add_subcommand("certify", "Run the sequential certificate on a random state");
  cert->add_option("--d", ca.d, "Dimension");
  cert->add_option("--rank", ca.rank, "Rank of the simulated state");
  cert->add_option("--sigma", ca.sigma, "Gaussian noise level");
  cert->add_option("--eps", ca.eps, "Target Frobenius accuracy");
  cert->add_option("--delta", ca.delta, "Failure probability");
  cert->add_option("--design", ca.design, "Design ensemble")
      ->check(CLI::IsMember({"gaussian", "pauli"}));
  cert->add_option("--noise", ca.noise, "gaussian (uses --sigma), gaussian:<sigma> or bernoulli:<T>");
  cert->add_option("--constants", ca.constants, "Confidence-set constants")
      ->check(CLI::IsMember({"theory", "simulation"}));
  cert->add_option("--constants-file", ca.constants_file, "Constants file from calibrate")
      ->check(CLI::ExistingFile);
  cert->add_option("--log", ca.log, "CSV epoch log to append to (empty disables)");
  cert->add_option("--seed", ca.seed, "Master seed");

  std::string cal_config, cal_out = "constants.txt";
  int cal_threads = 0;
  auto* cal = app.add_subcommand("calibrate", "Grid-search the empirical constants");
  cal->add_option("--config", cal_config, "key=value calibration config")->required()
      ->check(CLI::ExistingFile);
  cal->add_option("--out", cal_out, "Constants file to write ('-' for stdout)");
  cal->add_option("--threads", cal_threads, "Worker threads (0 keeps the config value)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_simulate(sim_config, sim_out, sim_threads);
    if (*cert) return cmd_certify(ca);
    if (*cal) return cmd_calibrate(cal_config, cal_out, cal_threads);
  } catch (const std::exception& e) {
    std::cerr << "lowrank-uq: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
