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

// memvol command line: kernels, volume estimates, sweeps, hard instances and
// exponent fits.

#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "memvol/bench.hpp"
#include "memvol/kernel.hpp"
#include "memvol/lowerbound.hpp"
#include "memvol/volume.hpp"

namespace {

using namespace memvol;

constexpr int kOk = 0;
constexpr int kEstimatorError = 1;
constexpr int kConfigError = 2;

struct Options {
  std::string body = "ball";
  int dim = 2;
  std::string eps = "0.01";
  std::string mode;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string eps_prime_mode = "tuned";
  std::string out;
  std::string bits = "random";
  std::string config;
  std::string csv;
  bool no_time = false;
};

nlohmann::json body_json(const std::string& s) {
  if (!s.empty() && s.front() == '{') return nlohmann::json::parse(s);
  if (s.size() > 5 && s.substr(s.size() - 5) == ".json") {
    std::ifstream f(s);
    if (!f) throw ContractViolation("cannot open body file '" + s + "'");
    return nlohmann::json::parse(f);
  }
  return s;
}

std::vector<double> parse_eps_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ContractViolation("bad eps value '" + item + "'");
    }
  }
  if (out.empty()) throw ContractViolation("no eps value given");
  return out;
}

double single_eps(const std::string& s) {
  const auto v = parse_eps_list(s);
  if (v.size() != 1) throw ContractViolation("expected a single eps value");
  return v[0];
}

// Writes to --out when given, stdout otherwise.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw ContractViolation("cannot write '" + path + "'");
  write(f);
}

int cmd_kernel(const Options& o) {
  const nlohmann::json bj = body_json(o.body);
  const BodySpec spec = resolve_body(bj, o.dim);
  const double eps = single_eps(o.eps);
  QueryLedger ledger;
  const auto t0 = std::chrono::steady_clock::now();
  const RoundedKernel k =
      construct_kernel(make_oracle(spec, ledger), spec.dim, eps, spec.outer_radius);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  const auto q = ledger.snapshot();
  nlohmann::json doc{
      {"manifest",
       {{"body", spec.to_json()},
        {"d", spec.dim},
        {"eps", eps},
        {"R_out", k.R_out},
        {"queries", q.membership_queries},
        {"wall_time_ms", ms},
        {"seed", o.seed}}},
      {"frame", k.L.to_json()},
      {"kernel", k.kernel.to_json()}};
  emit(o.out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return kOk;
}

int cmd_volume(const Options& o) {
  const nlohmann::json bj = body_json(o.body);
  const BodySpec spec = resolve_body(bj, o.dim);
  const double eps = single_eps(o.eps);
  const std::string mode = o.mode.empty() ? "det" : o.mode;
  if (mode != "det" && mode != "rand" && mode != "qsim")
    throw ContractViolation("volume: mode must be det, rand or qsim");
  const EpsPrimeMode epm = eps_prime_mode_from_string(o.eps_prime_mode);
  std::vector<ResultRow> rows;
  const int trials = mode == "det" ? 1 : o.trials;
  for (int t = 0; t < trials; ++t) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRow r = run_single(spec, body_label(bj), mode, eps,
                             o.seed + static_cast<std::uint64_t>(t), epm);
    r.trial = t;
    if (!o.no_time)
      r.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    rows.push_back(std::move(r));
  }
  emit(o.out, [&](std::ostream& os) { write_csv(os, rows); });
  return kOk;
}

int cmd_bench(const Options& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    std::ifstream f(o.config);
    if (!f) throw ContractViolation("cannot open config '" + o.config + "'");
    cfg = ExperimentConfig::from_json(nlohmann::json::parse(f));
  } else {
    cfg.bodies = {body_json(o.body)};
    cfg.dims = {o.dim};
    cfg.eps_grid = parse_eps_list(o.eps);
    if (!o.mode.empty()) {
      cfg.modes.clear();
      std::stringstream ss(o.mode);
      for (std::string m; std::getline(ss, m, ',');) cfg.modes.push_back(m);
    }
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.eps_prime_mode = eps_prime_mode_from_string(o.eps_prime_mode);
  }
  if (o.no_time) cfg.record_time = false;
  cfg.validate();
  const ExperimentResult res = run_experiment(cfg);
  const std::string path = o.out.empty() ? cfg.output : o.out;
  emit(path, [&](std::ostream& os) { write_csv(os, res.rows); });
  std::size_t bad = 0;
  for (const auto& r : res.rows) bad += r.ok() ? 0 : 1;
  std::cerr << res.rows.size() << " rows, " << bad << " failed, "
            << res.total.membership_queries << " membership queries\n";
  return kOk;
}

int cmd_lowerbound(const Options& o) {
  const double eps = single_eps(o.eps);
  const std::string est = o.mode.empty() ? "det" : o.mode;
  BitsSource src;
  Bits explicit_bits;
  const Bits* given = nullptr;
  if (o.bits.rfind("hex:", 0) == 0) {
    src = BitsSource::Explicit;
    const std::string hex = o.bits.substr(4);
    for (char c : hex) {
      if (!std::isxdigit(static_cast<unsigned char>(c)))
        throw ContractViolation("--bits hex: bad digit");
      const int v = std::stoi(std::string(1, c), nullptr, 16);
      for (int b = 3; b >= 0; --b) explicit_bits.push_back((v >> b) & 1);
    }
    given = &explicit_bits;
  } else {
    src = bits_source_from_string(o.bits);
  }
  auto inst = std::make_shared<CapBodyInstance>(
      make_hard_instance(o.dim, eps, src, o.seed, given));
  const BodySpec spec = BodySpec::cap_body(inst);
  const EpsPrimeMode epm = eps_prime_mode_from_string(o.eps_prime_mode);
  const double eps_est = est == "det" ? eps / 8.0 : eps;
  ResultRow r = run_single(spec, "capbody", est, eps_est, o.seed, epm);
  const long w = reduction_volume_to_hamming(*inst, r.value);
  const long truth = static_cast<long>(inst->weight());
  nlohmann::json doc{
      {"instance", inst->manifest()},
      {"reduction",
       {{"estimator", est},
        {"eps_est", eps_est},
        {"volume_estimate", r.value},
        {"true_volume", r.true_volume},
        {"n", inst->n()},
        {"w", w},
        {"true_weight", truth},
        {"within_n_over_4", std::abs(w - truth) * 4 <= static_cast<long>(inst->n())},
        {"membership_queries", r.queries.membership_queries},
        {"bit_queries", r.queries.bit_queries}}}};
  emit(o.out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return kOk;
}

int cmd_fit(const Options& o) {
  std::ifstream f(o.csv);
  if (!f) throw ContractViolation("cannot open '" + o.csv + "'");
  const auto rows = read_csv(f);
  std::set<std::tuple<std::string, int, std::string>> groups;
  for (const auto& r : rows)
    if (r.ok() && (o.mode.empty() || r.mode == o.mode))
      groups.insert({r.mode, r.dim, r.body});
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [mode, d, body] : groups) {
    nlohmann::json g{{"mode", mode}, {"dim", d}, {"body", body}};
    try {
      const FitResult fr = fit_exponent(rows, mode, d, body);
      g["slope"] = fr.slope;
      g["intercept"] = fr.intercept;
      g["r2"] = fr.r2;
      g["residuals"] = fr.residuals;
    } catch (const ContractViolation& e) {
      g["error"] = e.what();
    }
    out.push_back(g);
  }
  if (groups.empty()) throw ContractViolation("fit: no successful rows");
  emit(o.out, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memvol: membership-oracle volume estimation"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s) {
    s->add_option("--body", o.body, "builtin name, inline JSON or .json file");
    s->add_option("--dim", o.dim, "dimension (2..6)");
    s->add_option("--eps", o.eps, "precision (comma-separated list for bench)");
    s->add_option("--seed", o.seed, "seed (trial t uses seed + t)");
    s->add_option("--out", o.out, "output path (stdout when absent)");
  };
  auto* kernel = app.add_subcommand("kernel", "eps-kernel of a body as JSON");
  common(kernel);
  auto* volume = app.add_subcommand("volume", "volume estimate as CSV rows");
  common(volume);
  volume->add_option("--mode", o.mode, "det | rand | qsim");
  volume->add_option("--trials", o.trials, "trials (det runs once)");
  volume->add_option("--eps-prime-mode", o.eps_prime_mode, "paper | tuned");
  volume->add_flag("--no-time", o.no_time, "write wall_ms as 0");
  auto* bench = app.add_subcommand("bench", "parameter sweep to CSV");
  common(bench);
  bench->add_option("--mode", o.mode,
                    "det | rand | qsim | kernel | lowerbound (comma-separated)");
  bench->add_option("--trials", o.trials, "trials per point");
  bench->add_option("--eps-prime-mode", o.eps_prime_mode, "paper | tuned");
  bench->add_option("--config", o.config, "JSON experiment config");
  bench->add_flag("--no-time", o.no_time, "write wall_ms as 0");
  auto* lower = app.add_subcommand("lowerbound", "hard instance and reduction");
  lower->add_option("--dim", o.dim, "dimension");
  lower->add_option("--eps", o.eps, "instance precision");
  lower->add_option("--bits", o.bits, "random | balanced | zeros | ones | hex:<digits>");
  lower->add_option("--seed", o.seed, "seed");
  lower->add_option("--mode", o.mode, "estimator: det | rand | qsim");
  lower->add_option("--eps-prime-mode", o.eps_prime_mode, "paper | tuned");
  lower->add_option("--out", o.out, "output path");
  auto* fit = app.add_subcommand("fit", "log-log exponent fits from a CSV");
  fit->add_option("csv", o.csv, "CSV written by bench")->required();
  fit->add_option("--mode", o.mode, "restrict to one mode");
  fit->add_option("--out", o.out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    if (*kernel) return cmd_kernel(o);
    if (*volume) return cmd_volume(o);
    if (*bench) return cmd_bench(o);
    if (*lower) return cmd_lowerbound(o);
    if (*fit) return cmd_fit(o);
  } catch (const ContractViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "estimator error: " << e.what() << '\n';
    return kEstimatorError;
  }
  return kConfigError;
}
