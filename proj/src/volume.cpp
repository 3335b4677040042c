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

#include "memvol/volume.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "memvol/qae.hpp"
#include "memvol/rounding.hpp"
#include "memvol/sampling.hpp"

namespace memvol {

std::string to_string(VolumeMode m) {
  switch (m) {
    case VolumeMode::Deterministic: return "det";
    case VolumeMode::Randomized: return "rand";
    case VolumeMode::QuantumSim: return "qsim";
  }
  return "unknown";
}

std::string to_string(EpsPrimeMode m) {
  return m == EpsPrimeMode::Paper ? "paper" : "tuned";
}

EpsPrimeMode eps_prime_mode_from_string(const std::string& s) {
  if (s == "paper") return EpsPrimeMode::Paper;
  if (s == "tuned") return EpsPrimeMode::Tuned;
  throw ContractViolation("eps-prime mode must be 'paper' or 'tuned', got '" +
                          s + "'");
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw ContractViolation("volume: eps must lie in (0, 1)");
}

double eps_prime(int d, double eps, double R_used, EpsPrimeMode mode,
                 double exponent) {
  check_eps(eps);
  const double denom = mode == EpsPrimeMode::Paper
                           ? 4.0 * d * (d + 1.0) * (d + 1.0)
                           : 4.0 * R_used;
  return (std::pow(1.0 + std::pow(eps, exponent), 1.0 / d) - 1.0) / denom;
}

// Kernel precision with shell bound (1 + 4 e R_out)^d - 1 = target.
double precision_for_shell(int d, double target, double R_out) {
  return (std::pow(1.0 + target, 1.0 / d) - 1.0) / (4.0 * R_out);
}

Sandwich sandwich_with(const OracleHandle& h, int d, double R,
                       const std::function<double(double)>& precision,
                       Exec exec, double* eps_used) {
  if (h.dim() != d) throw ContractViolation("volume: dimension mismatch");
  OracleHandle base = h;
  double Rb = R;
  double scale = 1.0;
  std::optional<AffineMap> pre;
  const double inr = h.spec->inner_radius;
  if (inr < 1.0) {
    pre = AffineMap::scaling(d, 1.0 / inr);
    base = transformed_oracle(h, *pre);
    Rb = R / inr;
    scale = std::pow(inr, d);
  }
  const Rounding r = round_body(base, Rb);
  const double eps_k = precision(r.R_out);
  if (eps_used) *eps_used = eps_k;
  const OracleHandle rounded = transformed_oracle(base, r.L);
  const VPolytope inner = kernel_rounded(rounded, d, eps_k, r.R_out, exec);
  const AffineMap frame = pre ? r.L.compose(*pre) : r.L;
  Sandwich s{outer_approximation(inner, eps_k, r.R_out, frame), rounded,
             r.R_out, scale / std::abs(r.L.det())};
  return s;
}

VolumeEstimate start(VolumeMode m, double eps, std::uint64_t seed,
                     const Sandwich& s, double eps_k) {
  VolumeEstimate v;
  v.mode = m;
  v.eps_target = eps;
  v.eps_prime = eps_k;
  v.seed = seed;
  v.R_out = s.R_out;
  v.scale = s.scale;
  v.inner_volume = polytope_volume(s.pair.inner);
  v.shell_volume = polytope_volume(s.pair.outer) - v.inner_volume;
  v.shell_ratio = v.shell_volume / v.inner_volume;
  return v;
}

LedgerSnapshot snap(const OracleHandle& h) {
  return h.ledger ? h.ledger->snapshot() : LedgerSnapshot{};
}

}  // namespace

double eps_prime_randomized(int d, double eps, double R_used,
                            EpsPrimeMode mode) {
  return eps_prime(d, eps, R_used, mode, 4.0 / (d + 3.0));
}

double eps_prime_quantum(int d, double eps, double R_used, EpsPrimeMode mode) {
  return eps_prime(d, eps, R_used, mode, 2.0 / (d + 1.0));
}

Sandwich build_sandwich(const OracleHandle& h, int d, double eps_k, double R,
                        Exec exec) {
  return sandwich_with(h, d, R, [eps_k](double) { return eps_k; }, exec,
                       nullptr);
}

VolumeEstimate volume_deterministic(const OracleHandle& h, int d, double eps,
                                    double R, const VolumeOptions& opt) {
  check_eps(eps);
  const LedgerSnapshot before = snap(h);
  double eps_k = 0.0;
  const Sandwich s = sandwich_with(
      h, d, R, [&](double Ro) { return precision_for_shell(d, eps, Ro); },
      opt.exec, &eps_k);
  VolumeEstimate v = start(VolumeMode::Deterministic, eps, 0, s, eps_k);
  v.value = (v.inner_volume + 0.5 * v.shell_volume) * v.scale;
  v.queries = snap(h) - before;
  return v;
}

PreparedEstimate prepare_estimate(const OracleHandle& h, int d, VolumeMode mode,
                                  double eps, double R,
                                  const VolumeOptions& opt) {
  check_eps(eps);
  if (mode == VolumeMode::Deterministic)
    throw ContractViolation("prepare_estimate: deterministic mode has no refinement");
  const bool quantum = mode == VolumeMode::QuantumSim;
  const LedgerSnapshot before = snap(h);
  double eps_k = 0.0;
  const Sandwich s = sandwich_with(
      h, d, R,
      [&](double Ro) {
        return quantum ? eps_prime_quantum(d, eps, Ro, opt.eps_prime_mode)
                       : eps_prime_randomized(d, eps, Ro, opt.eps_prime_mode);
      },
      opt.exec, &eps_k);
  PreparedEstimate p{start(mode, eps, 0, s, eps_k), s, {}};
  if (quantum) {
    const double rr = p.base.shell_ratio / eps;
    const double want =
        std::min<double>(opt.max_cells, (100.0 * rr) * (100.0 * rr));
    p.amplitude = shell_amplitude(
        s.pair, s.rounded, std::max<long>(1000, static_cast<long>(want)),
        opt.exec);
    p.base.amplitude = p.amplitude.a;
    p.base.cells = p.amplitude.cells;
  }
  p.base.queries = snap(h) - before;
  return p;
}

VolumeEstimate finish_estimate(const PreparedEstimate& p, std::uint64_t seed) {
  VolumeEstimate v = p.base;
  v.seed = seed;
  const Sandwich& s = p.sandwich;
  const double rr = v.shell_ratio / v.eps_target;
  std::mt19937_64 rng(seed);
  // Refinement queries go to a private ledger first so that concurrent
  // calls report their own counts.
  QueryLedger local;
  OracleHandle oracle = s.rounded;
  oracle.ledger = &local;
  if (v.mode == VolumeMode::Randomized) {
    v.samples = std::max<long>(1, static_cast<long>(std::ceil(3.0 * rr * rr)));
    const ShellSampler shell(s.pair);
    long hits = 0;
    for (long i = 0; i < v.samples; ++i)
      if (membership(oracle, shell(rng))) ++hits;
    v.xi = static_cast<double>(hits) / v.samples;
  } else {
    int M = std::max(2, static_cast<int>(std::ceil(2.0 * std::numbers::pi * rr)));
    M += M % 2;
    v.M = M;
    v.xi = qae_sample(p.amplitude.a, M, rng);
    local.charge_model_quantum(2 * static_cast<std::uint64_t>(M) + 1);
  }
  v.value = (v.inner_volume + v.xi * v.shell_volume) * v.scale;
  const LedgerSnapshot spent = local.snapshot();
  if (s.rounded.ledger) s.rounded.ledger->charge(spent);
  v.queries = p.base.queries + spent;
  return v;
}

VolumeEstimate volume_randomized(const OracleHandle& h, int d, double eps,
                                 double R, std::uint64_t seed,
                                 const VolumeOptions& opt) {
  return finish_estimate(
      prepare_estimate(h, d, VolumeMode::Randomized, eps, R, opt), seed);
}

VolumeEstimate volume_quantum_sim(const OracleHandle& h, int d, double eps,
                                  double R, std::uint64_t seed,
                                  const VolumeOptions& opt) {
  return finish_estimate(
      prepare_estimate(h, d, VolumeMode::QuantumSim, eps, R, opt), seed);
}

// ---------------------------------------------------------------------------
// Shell amplitude

namespace {

// Kronecker lattice generators from the generalized golden ratio.
std::vector<double> kronecker_alpha(int k) {
  double phi = 2.0;
  for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / (k + 1));
  std::vector<double> a(k);
  for (int j = 0; j < k; ++j) a[j] = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
  return a;
}

// Uniform point of the simplex with vertices V[s[0..k]] from u in [0,1)^k,
// by stick breaking. The map preserves measure up to a constant.
Vec simplex_point(const Points& V, const VPolytope::Simplex& s, int k,
                  const double* u) {
  Vec y = Vec::Zero(V[s[0]].size());
  double rest = 1.0;
  for (int i = 0; i < k; ++i) {
    const double b = rest * (1.0 - std::pow(1.0 - u[i], 1.0 / (k - i)));
    y += b * V[s[i]];
    rest -= b;
  }
  y += rest * V[s[k]];
  return y;
}

}  // namespace

ShellAmplitude shell_amplitude(const SandwichPair& pair,
                               const OracleHandle& rounded, long cells,
                               Exec exec) {
  const VPolytope& P = pair.inner;
  const int d = P.dim();
  const auto& S = P.boundary_simplices();
  const long m = static_cast<long>(S.size());
  if (cells < m)
    throw EstimatorError("shell_amplitude: " + std::to_string(m) +
                         " boundary simplices exceed the cell budget " +
                         std::to_string(cells) + "; use a coarser eps");

  // Frustum volume over a boundary simplex is proportional to the volume of
  // its cone from the origin, the scaling centre of outer.
  const double lambda_d =
      polytope_volume(pair.outer) / polytope_volume(P);
  std::vector<double> w(m);
  double wsum = 0.0;
  for (long i = 0; i < m; ++i) {
    Mat A(d, d);
    for (int c = 0; c < d; ++c) A.col(c) = P.vertices()[S[i][c]];
    wsum += (w[i] = std::abs(A.determinant()));
  }
  const long layers = std::max<long>(
      1, std::lround(std::pow(static_cast<double>(cells), 1.0 / d)));
  const double tangential = static_cast<double>(cells) / layers;
  const std::vector<double> alpha = kronecker_alpha(d - 1);

  std::vector<double> inside(m, 0.0);
  std::vector<long> used(m, 0);
  auto run = [&](long i) {
    const long nt = std::max<long>(1, std::lround(tangential * w[i] / wsum));
    double u[kMaxDim];
    long hits = 0;
    for (long j = 0; j < nt; ++j) {
      u[0] = (j + 0.5) / nt;
      for (int c = 1; c < d - 1; ++c)
        u[c] = std::fmod(0.5 + (j + 1) * alpha[c], 1.0);
      const Vec y = simplex_point(P.vertices(), S[i], d - 1, u);
      for (long l = 0; l < layers; ++l) {
        // Equal-volume layers: t^d uniform on [1, lambda^d].
        const double t = std::pow(1.0 + (l + 0.5) / layers * (lambda_d - 1.0),
                                  1.0 / d);
        if (simulated_membership(rounded, t * y)) ++hits;
      }
    }
    inside[i] = static_cast<double>(hits) / (nt * layers);
    used[i] = nt * layers;
  };

  if (exec == Exec::Serial) {
    for (long i = 0; i < m; ++i) run(i);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < m; ++i) run(i);
  }
  ShellAmplitude out;
  double acc = 0.0;
  for (long i = 0; i < m; ++i) {
    acc += w[i] * inside[i];
    out.cells += used[i];
  }
  out.a = std::clamp(acc / wsum, 0.0, 1.0);
  return out;
}

FractionEstimate shell_fraction_mc(const SandwichPair& pair,
                                   const BodySpec& spec, const AffineMap& L,
                                   long samples, std::uint64_t seed,
                                   Exec exec) {
  if (samples < 2) throw ContractViolation("shell_fraction_mc: samples < 2");
  constexpr long kBlock = 4096;
  const long blocks = (samples + kBlock - 1) / kBlock;
  const ShellSampler shell(pair);
  std::vector<long> hits(blocks, 0);
  auto run = [&](long b) {
    std::seed_seq sq{seed, static_cast<std::uint64_t>(b)};
    std::mt19937_64 rng(sq);
    const long n = std::min(kBlock, samples - b * kBlock);
    long c = 0;
    for (long i = 0; i < n; ++i)
      if (spec_contains(spec, L.apply_inverse(shell(rng))))
        ++c;
    hits[b] = c;
  };
  if (exec == Exec::Serial) {
    for (long b = 0; b < blocks; ++b) run(b);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (long b = 0; b < blocks; ++b) run(b);
  }
  long total = 0;
  for (long c : hits) total += c;
  const double p = static_cast<double>(total) / samples;
  return {p, std::sqrt(p * (1.0 - p) / samples)};
}

}  // namespace memvol
