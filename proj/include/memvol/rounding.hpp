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

#include "memvol/oracle.hpp"

namespace memvol {

/// Raised when the rounded body fails its sandwich check.
class SandwichError : public EstimatorError {
 public:
  SandwichError(const std::string& what, Vec direction)
      : EstimatorError(what), direction_(std::move(direction)) {}
  const Vec& direction() const { return direction_; }

 private:
  Vec direction_;
};

struct Rounding {
  AffineMap L;
  double R_out = 1.0;
  double eps0 = 0.25;  // precision of the coarse kernel; 0 for identity
};

/// Affine L with B_d in L(K) in R_out B_d, for B_d in K in R B_d. Built from a
/// coarse kernel, its MVEE and an exact inradius rescale; checked on random
/// inner points and radial outer probes. Retries once with eps0 = 1/8.
/// Returns the identity with R_out = R when that is no looser.
Rounding round_body(const OracleHandle& h, double R);

/// Sandwich check alone. Throws SandwichError naming the bad direction.
void verify_sandwich(const OracleHandle& rounded, double R_out,
                     int num_probes = 1000, std::uint64_t seed = 99);

}  // namespace memvol
