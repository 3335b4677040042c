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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memvol/kernel.hpp"
#include "memvol/oracle.hpp"
#include "memvol/volume.hpp"

namespace memvol {

/// One sweep: every body x dim x eps x mode x trial.
struct ExperimentConfig {
  // Each entry is a builtin name ("ball", "box12", ...) or an inline body
  // JSON document. Inline bodies carry their own dimension and ignore dims.
  std::vector<nlohmann::json> bodies{"ball"};
  std::vector<int> dims{2};
  std::vector<double> eps_grid;  // strictly decreasing
  std::vector<std::string> modes{"det"};  // det rand qsim kernel lowerbound
  int trials = 1;
  std::uint64_t seed = 0;
  EpsPrimeMode eps_prime_mode = EpsPrimeMode::Tuned;
  std::string output;  // empty: caller decides
  bool parallel_trials = true;
  // Off makes the CSV byte-reproducible (wall_ms is written as 0).
  bool record_time = true;

  void validate() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct ResultRow {
  std::string body;
  int dim = 0;
  double eps = 0.0;
  std::string mode;
  std::string eps_prime_mode;
  int trial = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  double true_volume = 0.0;
  double rel_error = 0.0;
  LedgerSnapshot queries;
  double wall_ms = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

extern const char* const kCsvHeader;

std::string to_csv_line(const ResultRow& r);
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);

struct ExperimentResult {
  std::vector<ResultRow> rows;  // config order
  LedgerSnapshot total;         // all queries charged during the run
};

/// Runs the sweep. Estimator failures become rows whose status starts with
/// "error:". Deterministic mode runs a single trial whatever `trials` says.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Resolves a builtin name or inline JSON body.
BodySpec resolve_body(const nlohmann::json& body, int dim);

/// Display name used in the body column.
std::string body_label(const nlohmann::json& body);

/// One row for a single (body, mode, eps, seed). Throws on estimator errors.
ResultRow run_single(const BodySpec& spec, const std::string& label,
                     const std::string& mode, double eps, std::uint64_t seed,
                     EpsPrimeMode epm, Exec exec = Exec::Parallel);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> log_inv_eps;
  std::vector<double> log_queries;
  std::vector<double> residuals;
};

/// Query count a row contributes to the fit: model quantum queries for
/// qsim, membership queries otherwise.
double fit_queries(const ResultRow& r);

/// OLS of log(queries) on log(1/eps) over successful rows of one mode and
/// dimension, taking the median over trials at each eps. Needs at least
/// four distinct eps values. An empty body matches every body.
FitResult fit_exponent(const std::vector<ResultRow>& rows,
                       const std::string& mode, int d,
                       const std::string& body = "");

}  // namespace memvol
