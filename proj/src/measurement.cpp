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

#include "lowrank_uq/measurement.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>
#include <algorithm>

#include <boost/random/binomial_distribution.hpp>

#include "lowrank_uq/tolerances.hpp"

namespace lowrank_uq {

NoiseModel NoiseModel::gaussian(double sigma) { return gaussian(sigma, sigma * sigma); }

NoiseModel NoiseModel::gaussian(double sigma, double variance_bound) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("NoiseModel: σ must be non-negative");
  if (sigma * sigma > variance_bound * (1.0 + 1e-12))
    throw std::invalid_argument("NoiseModel: σ² exceeds the declared variance bound");
  NoiseModel m;
  m.kind_ = Kind::Gaussian;
  m.sigma_ = sigma;
  m.variance_bound_ = variance_bound;
  return m;
}

NoiseModel NoiseModel::bernoulli(int preparations) {
  if (preparations < 1) throw std::invalid_argument("NoiseModel: T must be positive");
  NoiseModel m;
  m.kind_ = Kind::BernoulliPauli;
  m.preparations_ = preparations;
  return m;
}

double NoiseModel::variance_bound(int d) const {
  return kind_ == Kind::Gaussian ? variance_bound_ : static_cast<double>(d) / preparations_;
}

std::string NoiseModel::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Gaussian) {
    char buf[32];
    os << "gaussian:" << std::string(buf, std::to_chars(buf, buf + sizeof(buf), sigma_).ptr);
  } else {
    os << "bernoulli:" << preparations_;
  }
  return os.str();
}

NoiseModel NoiseModel::parse(const std::string& s) {
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  try {
    if (head == "gaussian") return gaussian(arg.empty() ? 1.0 : std::stod(arg));
    if (head == "bernoulli") return bernoulli(std::stoi(arg));
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("unrecognized noise descriptor '" + s + "'");
}

MeasurementBatch make_batch(SensingPlan plan, RVec y, NoiseModel noise) {
  if (y.size() != plan.n()) throw std::invalid_argument("make_batch: length(y) != plan.n()");
  return MeasurementBatch{std::move(plan), std::move(y), noise, std::nullopt};
}

MeasurementBatch measure_gaussian(const SensingPlan& plan, const HermitianMatrix& theta,
                                  double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("measure_gaussian: σ must be non-negative");
  RVec y = apply_sampling(plan, theta);
  if (sigma > 0.0) {
    NormalSampler normal;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * normal(rng);
  }
  return make_batch(plan, std::move(y), NoiseModel::gaussian(sigma));
}

double outcome_probability(const PauliElement& element, const QuantumState& theta) {
  const double sqrt_d = std::sqrt(static_cast<double>(element.dim()));
  const double p = 0.5 * (1.0 + sqrt_d * element.trace_product(theta.matrix().mat()).real());
  if (p < -tol::kProbability || p > 1.0 + tol::kProbability) {
    std::ostringstream msg;
    msg << "outcome probability " << p << " outside [0,1]; state or basis invalid";
    throw std::invalid_argument(msg.str());
  }
  return std::clamp(p, 0.0, 1.0);
}

MeasurementBatch measure_bernoulli_pauli(const SensingPlan& plan, const QuantumState& theta,
                                         int preparations, Rng& rng) {
  if (!plan.ensemble().is_pauli())
    throw std::invalid_argument("measure_bernoulli_pauli: plan is not a Pauli design");
  if (preparations < 1) throw std::invalid_argument("measure_bernoulli_pauli: T must be positive");
  if (theta.dim() != plan.dim())
    throw std::invalid_argument("measure_bernoulli_pauli: dimension mismatch");
  const PauliBasis& basis = plan.ensemble().basis();
  const double sqrt_d = std::sqrt(static_cast<double>(plan.dim()));
  std::vector<double> prob(basis.size(), -1.0);
  RVec y(plan.n());
  for (int i = 0; i < plan.n(); ++i) {
    const std::uint32_t idx = plan.index(i);
    if (prob[idx] < 0.0) prob[idx] = outcome_probability(basis[idx], theta);
    boost::random::binomial_distribution<int, double> binom(preparations, prob[idx]);
    const int ups = binom(rng);
    y[i] = sqrt_d * (2.0 * ups - preparations) / preparations;
  }
  return make_batch(plan, std::move(y), NoiseModel::bernoulli(preparations));
}

MeasurementBatch measure(const SensingPlan& plan, const QuantumState& theta,
                         const NoiseModel& noise, Rng& rng) {
  if (noise.kind() == NoiseModel::Kind::BernoulliPauli)
    return measure_bernoulli_pauli(plan, theta, noise.preparations(), rng);
  MeasurementBatch b = measure_gaussian(plan, theta.matrix(), noise.sigma(), rng);
  b.noise = noise;
  return b;
}

namespace {

std::string shortest(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_batch_csv(std::ostream& os, const MeasurementBatch& batch) {
  const SensingPlan& plan = batch.plan;
  const bool pauli = plan.ensemble().is_pauli();
  if (!pauli && !plan.seed_derived())
    throw std::invalid_argument("write_batch_csv: Gaussian plan is not reproducible from its seed");
  os << "# kind=" << to_string(plan.ensemble().kind()) << " d=" << plan.dim()
     << " n=" << plan.n() << " noise=" << batch.noise.describe() << " seed=" << plan.seed()
     << '\n';
  os << "i,design,y\n";
  for (int i = 0; i < plan.n(); ++i) {
    os << i << ',';
    if (pauli) {
      os << plan.index(i);
    } else {
      os << 'g' << i;
    }
    os << ',' << shortest(batch.y[i]) << '\n';
  }
}

MeasurementBatch read_batch_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw std::invalid_argument("read_batch_csv: missing header line");
  std::istringstream hs(line.substr(2));
  std::string kind, noise;
  int d = 0, n = 0;
  std::uint64_t seed = 0;
  for (std::string kv; hs >> kv;) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("read_batch_csv: bad header field");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    if (key == "kind") kind = val;
    else if (key == "d") d = std::stoi(val);
    else if (key == "n") n = std::stoi(val);
    else if (key == "noise") noise = val;
    else if (key == "seed") seed = std::stoull(val);
  }
  if (n < 1) throw std::invalid_argument("read_batch_csv: bad sample count");
  const DesignEnsemble ens = DesignEnsemble::make(parse_design_kind(kind), d);
  std::getline(is, line);  // column names
  std::vector<std::uint32_t> idx;
  RVec y(n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw std::invalid_argument("read_batch_csv: truncated rows");
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::invalid_argument("read_batch_csv: malformed row");
    const std::string design = line.substr(c1 + 1, c2 - c1 - 1);
    if (ens.is_pauli()) idx.push_back(static_cast<std::uint32_t>(std::stoul(design)));
    const char* b = line.data() + c2 + 1;
    const char* e = line.data() + line.size();
    if (std::from_chars(b, e, y[i]).ec != std::errc{})
      throw std::invalid_argument("read_batch_csv: malformed value");
  }
  SensingPlan plan = ens.is_pauli() ? SensingPlan::from_indices(ens, std::move(idx), seed)
                                    : SensingPlan::gaussian_from_seed(ens, n, seed);
  return make_batch(std::move(plan), std::move(y), NoiseModel::parse(noise));
}

}  // namespace lowrank_uq
