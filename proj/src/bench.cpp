// Copyright 2026 The memvol Authors. All Rights Reserved.
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

#include "memvol/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "memvol/lowerbound.hpp"

namespace memvol {

const char* const kCsvHeader =
    "body,dim,eps,mode,eps_prime_mode,trial,seed,value,true_volume,rel_error,"
    "membership_queries,bit_queries,model_quantum_queries,"
    "simulator_evaluations,wall_ms,status";

namespace {

const std::vector<std::string> kModes{"det", "rand", "qsim", "kernel",
                                      "lowerbound"};

// Shortest text that reads back to the same double.
std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Status text must stay inside one CSV field.
std::string clean(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (bodies.empty()) throw ContractViolation("config: no bodies");
  if (dims.empty()) throw ContractViolation("config: no dims");
  if (eps_grid.empty()) throw ContractViolation("config: empty eps_grid");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0 && eps_grid[i] < 1.0))
      throw ContractViolation("config: eps values must lie in (0, 1)");
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
      throw ContractViolation("config: eps_grid must be strictly decreasing");
  }
  if (modes.empty()) throw ContractViolation("config: no modes");
  for (const auto& m : modes)
    if (std::find(kModes.begin(), kModes.end(), m) == kModes.end())
      throw ContractViolation("config: unknown mode '" + m + "'");
  if (trials < 1) throw ContractViolation("config: trials must be >= 1");
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"bodies", bodies},
          {"dims", dims},
          {"eps_grid", eps_grid},
          {"modes", modes},
          {"trials", trials},
          {"seed", seed},
          {"eps_prime_mode", to_string(eps_prime_mode)},
          {"output", output},
          {"parallel_trials", parallel_trials},
          {"record_time", record_time}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("body")) c.bodies = {j.at("body")};
    if (j.contains("bodies")) c.bodies = j.at("bodies").get<std::vector<nlohmann::json>>();
    if (j.contains("dims")) c.dims = j.at("dims").get<std::vector<int>>();
    c.eps_grid = j.at("eps_grid").get<std::vector<double>>();
    if (j.contains("modes")) c.modes = j.at("modes").get<std::vector<std::string>>();
    c.trials = j.value("trials", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    c.eps_prime_mode =
        eps_prime_mode_from_string(j.value("eps_prime_mode", std::string("tuned")));
    c.output = j.value("output", std::string());
    c.parallel_trials = j.value("parallel_trials", true);
    c.record_time = j.value("record_time", true);
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// CSV

std::string to_csv_line(const ResultRow& r) {
  std::ostringstream os;
  os << r.body << ',' << r.dim << ',' << fmt(r.eps) << ',' << r.mode << ','
     << r.eps_prime_mode << ',' << r.trial << ',' << r.seed << ','
     << fmt(r.value) << ',' << fmt(r.true_volume) << ',' << fmt(r.rel_error)
     << ',' << r.queries.membership_queries << ',' << r.queries.bit_queries
     << ',' << r.queries.model_quantum_queries << ','
     << r.queries.simulator_evaluations << ',' << fmt(r.wall_ms) << ','
     << clean(r.status);
  return os.str();
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << to_csv_line(r) << '\n';
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw ContractViolation("read_csv: missing or unexpected header");
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 16)
      throw ContractViolation("read_csv: line " + std::to_string(lineno) +
                              " has " + std::to_string(f.size()) + " fields");
    try {
      ResultRow r;
      r.body = f[0];
      r.dim = std::stoi(f[1]);
      r.eps = std::stod(f[2]);
      r.mode = f[3];
      r.eps_prime_mode = f[4];
      r.trial = std::stoi(f[5]);
      r.seed = std::stoull(f[6]);
      r.value = std::stod(f[7]);
      r.true_volume = std::stod(f[8]);
      r.rel_error = std::stod(f[9]);
      r.queries = {std::stoull(f[10]), std::stoull(f[11]), std::stoull(f[12]),
                   std::stoull(f[13])};
      r.wall_ms = std::stod(f[14]);
      r.status = f[15];
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ContractViolation("read_csv: bad number on line " +
                              std::to_string(lineno));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Runner

BodySpec resolve_body(const nlohmann::json& body, int dim) {
  if (body.is_string()) return BodySpec::builtin(body.get<std::string>(), dim);
  if (body.is_object()) return BodySpec::from_json(body);
  throw ContractViolation("body must be a builtin name or a JSON object");
}

std::string body_label(const nlohmann::json& body) {
  if (body.is_string()) return body.get<std::string>();
  return body.value("name", body.value("kind", std::string("body")));
}

ResultRow run_single(const BodySpec& spec, const std::string& label,
                     const std::string& mode, double eps, std::uint64_t seed,
                     EpsPrimeMode epm, Exec exec) {
  ResultRow r;
  r.body = label;
  r.dim = spec.dim;
  r.eps = eps;
  r.mode = mode;
  r.eps_prime_mode = to_string(epm);
  r.seed = seed;
  r.true_volume = analytic_volume(spec);

  QueryLedger ledger;
  const OracleHandle h = make_oracle(spec, ledger);
  const double R = spec.outer_radius;
  VolumeOptions opt;
  opt.eps_prime_mode = epm;
  opt.exec = exec;
  if (mode == "det") {
    r.value = volume_deterministic(h, spec.dim, eps, R, opt).value;
  } else if (mode == "rand") {
    r.value = volume_randomized(h, spec.dim, eps, R, seed, opt).value;
  } else if (mode == "qsim") {
    r.value = volume_quantum_sim(h, spec.dim, eps, R, seed, opt).value;
  } else if (mode == "kernel") {
    const RoundedKernel k = construct_kernel(h, spec.dim, eps, R, exec);
    r.value = polytope_volume(k.kernel) / std::abs(k.L.det());
  } else {
    throw ContractViolation("run_single: unknown mode '" + mode + "'");
  }
  r.rel_error = std::abs(r.value - r.true_volume) / r.true_volume;
  r.queries = ledger.snapshot();
  return r;
}

namespace {

struct Job {
  std::string label;
  nlohmann::json body;
  int dim;
  double eps;
  std::string mode;
  int trial;
  std::uint64_t seed;
};

ResultRow run_job(const Job& j, const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRow r;
  try {
    if (j.mode == "lowerbound") {
      // Instance built for eps, estimated at eps / 8, as in the reduction.
      auto inst = std::make_shared<CapBodyInstance>(
          make_hard_instance(j.dim, j.eps, BitsSource::Random, j.seed));
      r = run_single(BodySpec::cap_body(inst), "capbody", "det", j.eps / 8.0,
                     j.seed, cfg.eps_prime_mode, Exec::Serial);
      r.eps = j.eps;
      r.mode = j.mode;
    } else {
      r = run_single(resolve_body(j.body, j.dim), j.label, j.mode, j.eps,
                     j.seed, cfg.eps_prime_mode, Exec::Serial);
    }
  } catch (const std::exception& e) {
    r = ResultRow{};
    r.body = j.label;
    r.dim = j.dim;
    r.eps = j.eps;
    r.mode = j.mode;
    r.eps_prime_mode = to_string(cfg.eps_prime_mode);
    r.status = std::string("error: ") + e.what();
  }
  r.trial = j.trial;
  r.seed = j.seed;
  if (cfg.record_time)
    r.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return r;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Job> jobs;
  for (const auto& body : cfg.bodies) {
    std::vector<int> dims = cfg.dims;
    if (body.is_object()) dims = {body.at("dim").get<int>()};
    for (int d : dims)
      for (double eps : cfg.eps_grid)
        for (const auto& mode : cfg.modes) {
          const int trials = mode == "det" || mode == "kernel" ? 1 : cfg.trials;
          for (int t = 0; t < trials; ++t)
            jobs.push_back({body_label(body), body, d, eps, mode, t,
                            cfg.seed + static_cast<std::uint64_t>(t)});
        }
  }

  ExperimentResult out;
  out.rows.resize(jobs.size());
  const long n = static_cast<long>(jobs.size());
  if (cfg.parallel_trials) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) out.rows[i] = run_job(jobs[i], cfg);
  } else {
    for (long i = 0; i < n; ++i) out.rows[i] = run_job(jobs[i], cfg);
  }
  for (const auto& r : out.rows) {
    out.total.membership_queries += r.queries.membership_queries;
    out.total.bit_queries += r.queries.bit_queries;
    out.total.model_quantum_queries += r.queries.model_quantum_queries;
    out.total.simulator_evaluations += r.queries.simulator_evaluations;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fit

double fit_queries(const ResultRow& r) {
  if (r.mode == "qsim") return static_cast<double>(r.queries.model_quantum_queries);
  return static_cast<double>(r.queries.membership_queries);
}

FitResult fit_exponent(const std::vector<ResultRow>& rows,
                       const std::string& mode, int d,
                       const std::string& body) {
  std::map<double, std::vector<double>> by_eps;
  for (const auto& r : rows)
    if (r.ok() && r.mode == mode && r.dim == d &&
        (body.empty() || r.body == body) && fit_queries(r) > 0.0)
      by_eps[r.eps].push_back(fit_queries(r));
  if (by_eps.size() < 4)
    throw ContractViolation("fit_exponent: need at least 4 distinct eps values, "
                            "have " + std::to_string(by_eps.size()));
  FitResult f;
  for (auto& [eps, qs] : by_eps) {
    std::sort(qs.begin(), qs.end());
    const std::size_t m = qs.size();
    const double med = m % 2 ? qs[m / 2] : 0.5 * (qs[m / 2 - 1] + qs[m / 2]);
    f.log_inv_eps.push_back(-std::log(eps));
    f.log_queries.push_back(std::log(med));
  }
  const auto& x = f.log_inv_eps;
  const auto& y = f.log_queries;
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / k;
    my += y[i] / k;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(e);
    sse += e * e;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

}  // namespace memvol
