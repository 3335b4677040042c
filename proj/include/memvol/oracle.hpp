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

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memvol/geometry.hpp"
#include "memvol/types.hpp"

namespace memvol {

struct CapBodyInstance;

enum class BodyKind { Ball, Ellipsoid, Box, HPolytope, CapBody };

std::string to_string(BodyKind k);

/// Analytic convex test body. Every kind contains inner_radius * B_d and is
/// contained in outer_radius * B_d. inner_radius is 1 except for cap bodies,
/// whose missing caps cut below the unit sphere.
struct BodySpec {
  BodyKind kind = BodyKind::Ball;
  int dim = 0;
  double outer_radius = 1.0;
  double inner_radius = 1.0;

  double radius = 1.0;                     // Ball
  Mat shape;                               // Ellipsoid {x : x^T A x <= 1}
  Vec halfwidths;                          // Box
  std::vector<Halfspace> halfspaces;       // HPolytope
  Points hvertices;                        // HPolytope, enumerated on build
  std::shared_ptr<const CapBodyInstance> capbody;

  static BodySpec ball(int d, double radius = 1.0);
  static BodySpec ellipsoid(const Mat& A);
  static BodySpec ellipsoid_axes(const Vec& semi_axes);
  static BodySpec box(const Vec& halfwidths);
  static BodySpec hpolytope(int d, std::vector<Halfspace> hs);
  static BodySpec cap_body(std::shared_ptr<const CapBodyInstance> inst);

  /// Named bodies for the CLI: ball, cube, box, ellipsoid, crosspolytope.
  static BodySpec builtin(const std::string& name, int d);

  nlohmann::json to_json() const;
  static BodySpec from_json(const nlohmann::json& j);
};

struct LedgerSnapshot {
  std::uint64_t membership_queries = 0;
  std::uint64_t bit_queries = 0;
  std::uint64_t model_quantum_queries = 0;
  std::uint64_t simulator_evaluations = 0;

  LedgerSnapshot operator+(const LedgerSnapshot& o) const {
    return {membership_queries + o.membership_queries,
            bit_queries + o.bit_queries,
            model_quantum_queries + o.model_quantum_queries,
            simulator_evaluations + o.simulator_evaluations};
  }
  LedgerSnapshot operator-(const LedgerSnapshot& o) const {
    return {membership_queries - o.membership_queries,
            bit_queries - o.bit_queries,
            model_quantum_queries - o.model_quantum_queries,
            simulator_evaluations - o.simulator_evaluations};
  }
};

/// Query counters. Increments are atomic so a ledger may be shared by the
/// OpenMP kernels.
class QueryLedger {
 public:
  void charge_membership(std::uint64_t n = 1) {
    membership_.fetch_add(n, std::memory_order_relaxed);
  }
  void charge_bits(std::uint64_t n = 1) {
    bits_.fetch_add(n, std::memory_order_relaxed);
  }
  void charge_model_quantum(std::uint64_t n) {
    quantum_.fetch_add(n, std::memory_order_relaxed);
  }
  void charge_simulator(std::uint64_t n = 1) {
    simulator_.fetch_add(n, std::memory_order_relaxed);
  }

  // Adds every counter of s.
  void charge(const LedgerSnapshot& s) {
    charge_membership(s.membership_queries);
    charge_bits(s.bit_queries);
    charge_model_quantum(s.model_quantum_queries);
    charge_simulator(s.simulator_evaluations);
  }

  LedgerSnapshot snapshot() const {
    return {membership_.load(), bits_.load(), quantum_.load(),
            simulator_.load()};
  }

 private:
  std::atomic<std::uint64_t> membership_{0};
  std::atomic<std::uint64_t> bits_{0};
  std::atomic<std::uint64_t> quantum_{0};
  std::atomic<std::uint64_t> simulator_{0};
};

/// Membership oracle of L(K) where K is `spec` and L is `pre_map` (identity
/// when absent). Queries are charged to `ledger`.
struct OracleHandle {
  std::shared_ptr<const BodySpec> spec;
  QueryLedger* ledger = nullptr;
  std::optional<AffineMap> pre_map;

  OracleHandle() = default;
  OracleHandle(std::shared_ptr<const BodySpec> s, QueryLedger* l)
      : spec(std::move(s)), ledger(l) {}

  int dim() const { return spec->dim; }
};

OracleHandle make_oracle(const BodySpec& spec, QueryLedger& ledger);

/// One charged membership query.
bool membership(const OracleHandle& h, const Vec& x);

/// Classical evaluation inside a simulated quantum routine: charged to
/// simulator_evaluations, never to membership or bit queries.
bool simulated_membership(const OracleHandle& h, const Vec& x);

/// Analytic predicate with no ledger charge. Cap bodies read their bits
/// without charging.
bool spec_contains(const BodySpec& spec, const Vec& x);

/// Handle for L(K); shares the ledger.
OracleHandle transformed_oracle(const OracleHandle& h, const AffineMap& L);

double analytic_volume(const BodySpec& spec);

/// h_K(u) = max over K of u.x. Throws UnsupportedOperation for cap bodies.
double analytic_support(const BodySpec& spec, const Vec& u);

}  // namespace memvol
