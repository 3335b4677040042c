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
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "memvol/geometry.hpp"
#include "memvol/oracle.hpp"
#include "memvol/point_grid.hpp"

namespace memvol {

using Bits = std::vector<std::uint8_t>;

/// Unit ball with a disjoint packing of caps of chordal radius r = delta/2
/// around the points of a delta-net; cap j is present iff bits[j] = 1.
struct CapBodyInstance {
  int dim = 0;
  Net net;
  double delta = 0.0;
  double cap_radius = 0.0;
  Bits bits;
  double cap_volume = 0.0;
  double base_volume = 0.0;
  // Precision the instance was built for (0 when built from a raw delta).
  double eps_inst = 0.0;
  std::shared_ptr<const PointGrid> index;

  std::size_t n() const { return bits.size(); }
  std::size_t weight() const;

  /// Index of the cap whose slab contains p, or -1 when p lies in K_0.
  /// Assumes |p| <= 1.
  int cap_of(const Vec& p) const;

  nlohmann::json manifest() const;
  static CapBodyInstance from_manifest(const nlohmann::json& j);
};

/// Bitstring access charging one bit query per read.
class BitOracle {
 public:
  BitOracle(const Bits& bits, QueryLedger& ledger)
      : bits_(&bits), ledger_(&ledger) {}

  bool read(std::size_t j) const {
    ledger_->charge_bits();
    return (*bits_)[j] != 0;
  }
  std::size_t size() const { return bits_->size(); }
  QueryLedger& ledger() const { return *ledger_; }
  // Simulation-only view of the whole string, for the amplitude oracle.
  const Bits& raw() const { return *bits_; }

 private:
  const Bits* bits_;
  QueryLedger* ledger_;
};

enum class BitsSource { Explicit, Random, Balanced, Zeros, Ones };

BitsSource bits_source_from_string(const std::string& s);

Bits make_bits(std::size_t n, BitsSource src, std::uint64_t seed,
               const Bits* explicit_bits = nullptr);

/// Instance on a delta-net of the unit sphere with caps of radius delta/2.
CapBodyInstance make_cap_instance(int d, double delta, Bits bits);

/// Smallest delta (to relative tolerance 1e-3) whose cap packing has total
/// volume at least 8 eps Gamma_d.
CapBodyInstance make_hard_instance(int d, double eps, BitsSource src,
                                   std::uint64_t seed = 0,
                                   const Bits* explicit_bits = nullptr);

/// Membership in K_x. At most one bit query per call.
bool capbody_membership(const CapBodyInstance& inst, const Vec& p,
                        const BitOracle& o);

double capbody_volume(const CapBodyInstance& inst);

Bits recover_bitstring_deterministic(const BitOracle& o, std::size_t n);

/// Samples min(ceil(3 (n/k)^2), n) bits, with replacement, or reads all of
/// them when that is no more expensive.
long hamming_weight_randomized(const BitOracle& o, std::size_t n, std::size_t k,
                               std::uint64_t seed);

/// Counting by simulated amplitude estimation with M = ceil(2 pi n / k).
long hamming_weight_qae(const BitOracle& o, std::size_t n, std::size_t k,
                        std::uint64_t seed);

long reduction_volume_to_hamming(const CapBodyInstance& inst, double V);

}  // namespace memvol
