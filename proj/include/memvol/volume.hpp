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
#include <string>

#include "memvol/kernel.hpp"
#include "memvol/oracle.hpp"

namespace memvol {

enum class VolumeMode { Deterministic, Randomized, QuantumSim };
enum class EpsPrimeMode { Paper, Tuned };

std::string to_string(VolumeMode m);
std::string to_string(EpsPrimeMode m);
EpsPrimeMode eps_prime_mode_from_string(const std::string& s);

/// Kernel precision of the randomized refinement. Paper mode divides by
/// 4 d (d+1)^2, tuned mode by 4 R_used.
double eps_prime_randomized(int d, double eps, double R_used,
                            EpsPrimeMode mode = EpsPrimeMode::Tuned);

/// Same with exponent 2/(d+1).
double eps_prime_quantum(int d, double eps, double R_used,
                         EpsPrimeMode mode = EpsPrimeMode::Tuned);

struct VolumeEstimate {
  double value = 0.0;  // original coordinates
  VolumeMode mode = VolumeMode::Deterministic;
  double eps_target = 0.0;
  double eps_prime = 0.0;  // kernel precision actually used
  LedgerSnapshot queries;
  std::uint64_t seed = 0;
  double shell_ratio = 0.0;  // Vol(outer)/Vol(inner) - 1

  double R_out = 0.0;
  double inner_volume = 0.0;  // rounded coordinates
  double shell_volume = 0.0;  // rounded coordinates
  double scale = 1.0;         // original volume = rounded volume * scale
  long samples = 0;           // shell samples (randomized)
  double xi = 0.0;            // shell fraction estimate
  double amplitude = 0.0;     // discretized true shell fraction (quantum)
  int M = 0;                  // QAE resolution (quantum)
  long cells = 0;             // discretization cells (quantum)
};

struct VolumeOptions {
  EpsPrimeMode eps_prime_mode = EpsPrimeMode::Tuned;
  Exec exec = Exec::Parallel;
  // Quantum: discretization cells requested before the resolution rule.
  long max_cells = 10000000;
};

/// Kernel sandwich at precision eps_k with rounding folded in. Cap bodies,
/// which only contain inner_radius * B_d, are first scaled up to contain B_d.
struct Sandwich {
  SandwichPair pair;
  OracleHandle rounded;  // oracle of the body in pair.frame coordinates
  double R_out = 1.0;
  double scale = 1.0;    // original volume = rounded volume * scale
};

Sandwich build_sandwich(const OracleHandle& h, int d, double eps_k, double R,
                        Exec exec = Exec::Parallel);

/// Midpoint of the sandwich with the kernel precision solved from
/// (1 + 4 eps_k R_out)^d - 1 = eps. Relative error at most eps / 2.
VolumeEstimate volume_deterministic(const OracleHandle& h, int d, double eps,
                                    double R, const VolumeOptions& opt = {});

struct ShellAmplitude {
  double a = 0.0;
  long cells = 0;
};

/// Seed-independent part of a randomized or quantum estimate: the sandwich
/// and, for the quantum mode, the discretized amplitude. `base` holds the
/// sandwich fields and the queries spent so far.
struct PreparedEstimate {
  VolumeEstimate base;
  Sandwich sandwich;
  ShellAmplitude amplitude;
};

PreparedEstimate prepare_estimate(const OracleHandle& h, int d, VolumeMode mode,
                                  double eps, double R,
                                  const VolumeOptions& opt = {});

/// Seeded refinement of a prepared estimate. The returned queries include
/// the preparation, so each call reports the cost of a standalone run; the
/// refinement queries are also charged to the preparing ledger. Safe to call
/// concurrently.
VolumeEstimate finish_estimate(const PreparedEstimate& p, std::uint64_t seed);

/// Vol(inner) + xi Vol(shell) with xi the hit rate of ceil(3 (rho/eps)^2)
/// uniform shell points, one membership query each.
VolumeEstimate volume_randomized(const OracleHandle& h, int d, double eps,
                                 double R, std::uint64_t seed,
                                 const VolumeOptions& opt = {});

/// As randomized, with xi drawn from the amplitude estimation law at
/// M = ceil(2 pi rho / eps) (rounded up to even) around the discretized
/// shell fraction.
VolumeEstimate volume_quantum_sim(const OracleHandle& h, int d, double eps,
                                  double R, std::uint64_t seed,
                                  const VolumeOptions& opt = {});


/// Fraction of the shell inside the body, by an equal-volume cell split of
/// the shell: each boundary simplex of inner carries a frustum
/// {t y : y in simplex, 1 <= t <= lambda}, cut into radial layers of equal
/// volume and tangential cells of equal area. One simulator evaluation per
/// cell centre.
ShellAmplitude shell_amplitude(const SandwichPair& pair,
                               const OracleHandle& rounded, long cells,
                               Exec exec = Exec::Parallel);

/// Monte Carlo shell fraction using the analytic predicate of L(K) (no
/// ledger charge). Blocks of 4096 samples use seeds derived from `seed`
/// and the block index, so the result does not depend on thread count.
struct FractionEstimate {
  double value = 0.0;
  double std_error = 0.0;
};
FractionEstimate shell_fraction_mc(const SandwichPair& pair,
                                   const BodySpec& spec, const AffineMap& L,
                                   long samples, std::uint64_t seed,
                                   Exec exec = Exec::Parallel);

}  // namespace memvol
