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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "memvol/bench.hpp"

using namespace memvol;

namespace {

std::string csv_of(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

ExperimentConfig small_config(const std::string& mode, int trials) {
  ExperimentConfig c;
  c.bodies = {"ball"};
  c.dims = {2};
  c.eps_grid = {0.05};
  c.modes = {mode};
  c.trials = trials;
  c.seed = 7;
  c.record_time = false;
  return c;
}

std::filesystem::path temp_dir() {
  auto p = std::filesystem::temp_directory_path() / "memvol_test_bench";
  std::filesystem::create_directories(p);
  return p;
}

// Exit status of a shell command.
int run(const std::string& cmd) {
  const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string cli() { return MEMVOL_CLI_PATH; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV

TEST(Csv, ExactHeader) {
  EXPECT_STREQ(kCsvHeader,
               "body,dim,eps,mode,eps_prime_mode,trial,seed,value,true_volume,"
               "rel_error,membership_queries,bit_queries,model_quantum_queries,"
               "simulator_evaluations,wall_ms,status");
  std::ostringstream os;
  write_csv(os, {});
  EXPECT_EQ(os.str(), std::string(kCsvHeader) + "\n");
}

TEST(Csv, RoundTrip) {
  ResultRow r;
  r.body = "ball";
  r.dim = 3;
  r.eps = 1e-5;
  r.mode = "qsim";
  r.eps_prime_mode = "paper";
  r.trial = 4;
  r.seed = 12;
  r.value = 4.188790204786391;
  r.true_volume = 4.1887902047863905;
  r.rel_error = 1.2e-16;
  r.queries = {1, 2, 3, 4};
  r.wall_ms = 0.5;
  r.status = "error: a, b";
  std::istringstream is(csv_of({r}));
  const auto back = read_csv(is);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].eps, 1e-5);
  EXPECT_EQ(back[0].value, r.value);
  EXPECT_EQ(back[0].queries.simulator_evaluations, 4u);
  EXPECT_EQ(back[0].status, "error: a; b");
  EXPECT_NE(csv_of({r}).find(",1e-05,"), std::string::npos);
}

TEST(Csv, RejectsWrongHeaderAndShortLines) {
  std::istringstream bad("body,dim\n");
  EXPECT_THROW(read_csv(bad), ContractViolation);
  std::istringstream shortline(std::string(kCsvHeader) + "\nball,2,0.1\n");
  EXPECT_THROW(read_csv(shortline), ContractViolation);
}

// ---------------------------------------------------------------------------
// Runner

TEST(RunExperiment, OneRowPerTrial) {
  const auto res = run_experiment(small_config("rand", 3));
  ASSERT_EQ(res.rows.size(), 3u);
  for (int t = 0; t < 3; ++t) {
    EXPECT_EQ(res.rows[t].trial, t);
    EXPECT_EQ(res.rows[t].seed, 7u + t);
    EXPECT_TRUE(res.rows[t].ok()) << res.rows[t].status;
    EXPECT_EQ(res.rows[t].mode, "rand");
  }
}

TEST(RunExperiment, DeterministicModeCollapsesTrials) {
  const auto res = run_experiment(small_config("det", 5));
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_LE(res.rows[0].rel_error, 0.05);
}

TEST(RunExperiment, ByteIdenticalReruns) {
  ExperimentConfig c = small_config("rand", 4);
  c.modes = {"det", "rand", "qsim"};
  c.eps_grid = {0.1, 0.05};
  const std::string a = csv_of(run_experiment(c).rows);
  const std::string b = csv_of(run_experiment(c).rows);
  EXPECT_EQ(a, b);
  c.parallel_trials = false;
  EXPECT_EQ(csv_of(run_experiment(c).rows), a);
}

TEST(RunExperiment, LedgerIntegrity) {
  ExperimentConfig c = small_config("rand", 2);
  c.modes = {"det", "rand", "qsim", "kernel"};
  const auto res = run_experiment(c);
  // Per-row counts read back from the CSV add up to the run total ...
  std::istringstream is(csv_of(res.rows));
  LedgerSnapshot sum;
  for (const auto& r : read_csv(is)) sum = sum + r.queries;
  EXPECT_EQ(sum.membership_queries, res.total.membership_queries);
  EXPECT_EQ(sum.model_quantum_queries, res.total.model_quantum_queries);
  EXPECT_EQ(sum.simulator_evaluations, res.total.simulator_evaluations);
  // ... and each row matches an independent run on a fresh ledger.
  for (const auto& r : res.rows) {
    QueryLedger L;
    const auto h = make_oracle(BodySpec::ball(2), L);
    if (r.mode == "det") volume_deterministic(h, 2, r.eps, 1.0);
    if (r.mode == "rand") volume_randomized(h, 2, r.eps, 1.0, r.seed);
    if (r.mode == "qsim") volume_quantum_sim(h, 2, r.eps, 1.0, r.seed);
    if (r.mode == "kernel") construct_kernel(h, 2, r.eps, 1.0);
    const auto s = L.snapshot();
    EXPECT_EQ(s.membership_queries, r.queries.membership_queries) << r.mode;
    EXPECT_EQ(s.model_quantum_queries, r.queries.model_quantum_queries) << r.mode;
    EXPECT_EQ(s.simulator_evaluations, r.queries.simulator_evaluations) << r.mode;
  }
}

TEST(RunExperiment, EstimatorFailureBecomesRow) {
  ExperimentConfig c = small_config("lowerbound", 1);
  c.eps_grid = {0.5};  // too large for a hard instance
  const auto res = run_experiment(c);
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_FALSE(res.rows[0].ok());
  EXPECT_EQ(res.rows[0].status.rfind("error:", 0), 0u);
}

TEST(RunExperiment, LowerboundModeRecoversWeight) {
  ExperimentConfig c = small_config("lowerbound", 1);
  c.eps_grid = {1e-2};
  const auto res = run_experiment(c);
  ASSERT_EQ(res.rows.size(), 1u);
  const auto& r = res.rows[0];
  EXPECT_TRUE(r.ok()) << r.status;
  EXPECT_EQ(r.body, "capbody");
  EXPECT_LE(r.rel_error, 1e-2 / 8);
  EXPECT_GT(r.queries.bit_queries, 0u);
}

TEST(RunExperiment, InlineBodyCarriesDimension) {
  ExperimentConfig c = small_config("det", 1);
  c.bodies = {nlohmann::json::parse(
      R"({"kind":"box","dim":2,"halfwidths":[1,2],"name":"slab"})")};
  c.dims = {3, 5};
  c.eps_grid = {0.1};
  const auto res = run_experiment(c);
  ASSERT_EQ(res.rows.size(), 1u);
  EXPECT_EQ(res.rows[0].body, "slab");
  EXPECT_EQ(res.rows[0].dim, 2);
  EXPECT_NEAR(res.rows[0].true_volume, 8.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Config

TEST(Config, Validation) {
  ExperimentConfig c = small_config("det", 1);
  EXPECT_NO_THROW(c.validate());
  c.eps_grid = {0.01, 0.1};
  EXPECT_THROW(c.validate(), ContractViolation);
  c = small_config("det", 1);
  c.trials = 0;
  EXPECT_THROW(c.validate(), ContractViolation);
  c = small_config("teleport", 1);
  EXPECT_THROW(c.validate(), ContractViolation);
  c = small_config("det", 1);
  c.eps_grid = {1.5};
  EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c = small_config("rand", 3);
  c.eps_prime_mode = EpsPrimeMode::Paper;
  c.output = "out.csv";
  const auto d = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(d.to_json(), c.to_json());
  const auto e = ExperimentConfig::from_json(
      nlohmann::json::parse(R"({"body":"cube","eps_grid":[0.1,0.01]})"));
  EXPECT_EQ(e.bodies.size(), 1u);
  EXPECT_EQ(e.modes, std::vector<std::string>{"det"});
  EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json::parse(R"({"dims":[2]})")),
               ContractViolation);
}

// ---------------------------------------------------------------------------
// Fit

TEST(Fit, ExactPowerLaw) {
  std::vector<ResultRow> rows;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6})
    for (int t = 0; t < 3; ++t) {
      ResultRow r;
      r.mode = "rand";
      r.dim = 2;
      r.eps = eps;
      r.queries.membership_queries =
          static_cast<std::uint64_t>(std::llround(7e6 * std::pow(eps, -0.5)));
      rows.push_back(r);
    }
  const FitResult f = fit_exponent(rows, "rand", 2);
  EXPECT_NEAR(f.slope, 0.5, 1e-9);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(7e6), 1e-8);
  for (double e : f.residuals) EXPECT_NEAR(e, 0.0, 1e-9);
}

TEST(Fit, MedianOverTrialsAndModeCounts) {
  std::vector<ResultRow> rows;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    for (double mult : {1.0, 1.0, 50.0}) {  // one outlier trial per eps
      ResultRow r;
      r.mode = "qsim";
      r.dim = 2;
      r.eps = eps;
      r.queries.membership_queries = 999;
      r.queries.model_quantum_queries =
          static_cast<std::uint64_t>(std::llround(mult * 1e6 * std::pow(eps, -1.0 / 3)));
      rows.push_back(r);
    }
  }
  EXPECT_NEAR(fit_exponent(rows, "qsim", 2).slope, 1.0 / 3, 1e-6);
}

TEST(Fit, InsufficientPointsAndFailedRows) {
  std::vector<ResultRow> rows;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    ResultRow r;
    r.mode = "det";
    r.dim = 2;
    r.eps = eps;
    r.queries.membership_queries = 100;
    rows.push_back(r);
  }
  rows.back().status = "error: boom";
  EXPECT_THROW(fit_exponent(rows, "det", 2), ContractViolation);
  EXPECT_THROW(fit_exponent(rows, "det", 3), ContractViolation);
}

// ---------------------------------------------------------------------------
// CLI

TEST(Cli, ExitCodes) {
  const std::string c = cli();
  EXPECT_EQ(run(c + " volume --body ball --dim 2 --eps 0.05 --mode rand --seed 7"), 0);
  EXPECT_EQ(run(c + " volume --frobnicate"), 2);
  EXPECT_EQ(run(c), 2);
  EXPECT_EQ(run(c + " volume --body blob --dim 2 --eps 0.05"), 2);
  EXPECT_EQ(run(c + " volume --body ball --dim 9 --eps 0.05"), 2);
  EXPECT_EQ(run(c + " volume --body ball --eps 2"), 2);
  EXPECT_EQ(run(c + " lowerbound --dim 2 --eps 0.5"), 1);
  EXPECT_EQ(run(c + " lowerbound --dim 2 --eps 1e-2 --bits hex:zz"), 2);
}

TEST(Cli, VolumeRowToFile) {
  const auto dir = temp_dir();
  const auto out = dir / "vol.csv";
  ASSERT_EQ(run(cli() + " volume --body ball --dim 2 --eps 0.02 --mode rand --seed 7 --no-time --out " +
                out.string()),
            0);
  std::istringstream is(slurp(out));
  const auto rows = read_csv(is);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].seed, 7u);
  EXPECT_EQ(rows[0].mode, "rand");
  EXPECT_TRUE(rows[0].ok());
}

TEST(Cli, BenchThenFit) {
  const auto dir = temp_dir();
  const auto csv = dir / "r.csv";
  const auto fit = dir / "fit.json";
  ASSERT_EQ(run(cli() + " bench --body ball --dim 2 --eps 1e-1,3e-2,1e-2,3e-3 --mode det --out " +
                csv.string()),
            0);
  ASSERT_EQ(run(cli() + " fit " + csv.string() + " --out " + fit.string()), 0);
  const auto j = nlohmann::json::parse(slurp(fit));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["mode"], "det");
  EXPECT_NEAR(j[0]["slope"].get<double>(), 0.5, 0.2);
}

TEST(Cli, ConfigFileMatchesFlags) {
  const auto dir = temp_dir();
  const auto cfg = dir / "cfg.json";
  {
    std::ofstream f(cfg);
    f << R"({"bodies":["ball"],"dims":[2],"eps_grid":[0.05],"modes":["rand"],"trials":2,"seed":3})";
  }
  const auto a = dir / "a.csv", b = dir / "b.csv";
  ASSERT_EQ(run(cli() + " bench --config " + cfg.string() + " --no-time --out " + a.string()), 0);
  ASSERT_EQ(run(cli() + " bench --body ball --dim 2 --eps 0.05 --mode rand --trials 2 --seed 3 --no-time --out " +
                b.string()),
            0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, LowerboundReport) {
  const auto dir = temp_dir();
  const auto out = dir / "lb.json";
  ASSERT_EQ(run(cli() + " lowerbound --dim 2 --eps 1e-2 --bits random --seed 3 --out " +
                out.string()),
            0);
  const auto j = nlohmann::json::parse(slurp(out));
  EXPECT_TRUE(j["reduction"]["within_n_over_4"].get<bool>());
  EXPECT_EQ(j["reduction"]["w"], j["reduction"]["true_weight"]);
  EXPECT_EQ(j["instance"]["n"], j["reduction"]["n"]);
}

TEST(Cli, KernelJson) {
  const auto dir = temp_dir();
  const auto out = dir / "k.json";
  ASSERT_EQ(run(cli() + " kernel --body ellipsoid --dim 2 --eps 0.05 --out " + out.string()), 0);
  const auto j = nlohmann::json::parse(slurp(out));
  for (const char* k : {"body", "d", "eps", "R_out", "queries", "wall_time_ms", "seed"})
    EXPECT_TRUE(j["manifest"].contains(k)) << k;
  const VPolytope P = VPolytope::from_json(j["kernel"]);
  const AffineMap L = AffineMap::from_json(j["frame"]);
  const BodySpec spec = BodySpec::builtin("ellipsoid", 2);
  EXPECT_TRUE(kernel_width_check(P, spec, 0.05, 1000, &L).pass);
}

TEST(Cli, CommaSeparatedModes) {
  const auto out = temp_dir() / "modes.csv";
  ASSERT_EQ(run(cli() + " bench --body ball --dim 2 --eps 0.1 --mode det,rand --trials 2 --out " +
                out.string()),
            0);
  std::istringstream is(slurp(out));
  const auto rows = read_csv(is);
  ASSERT_EQ(rows.size(), 3u);  // det once, rand twice
  EXPECT_EQ(rows[0].mode, "det");
  EXPECT_EQ(rows[2].mode, "rand");
}
