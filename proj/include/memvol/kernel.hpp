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
#include <vector>

#include "memvol/oracle.hpp"

namespace memvol {

enum class Exec { Serial, Parallel };

/// Approximate projections of each point onto the body. The serial path is
/// the reference; the parallel path returns the same points in the same
/// order.
Points project_points(const OracleHandle& h, std::span<const Vec> xs,
                      double eps, double R, Exec exec = Exec::Parallel);

/// eps-kernel of a body with B_d in K in R B_d: hull of the projections of a
/// sqrt(eps/R)-net of (R+1) S^{d-1}.
VPolytope kernel_rounded(const OracleHandle& h, int d, double eps, double R,
                         Exec exec = Exec::Parallel);

struct RoundedKernel {
  VPolytope kernel;  // in rounded coordinates
  AffineMap L;       // original -> rounded
  double R_out = 1.0;
};

RoundedKernel construct_kernel(const OracleHandle& h, int d, double eps,
                               double R, Exec exec = Exec::Parallel);

struct SandwichPair {
  VPolytope inner;
  VPolytope outer;
  double shell_ratio_bound = 0.0;
  AffineMap frame;
};

/// outer = (1 + 4 eps R_out) inner. Needs B_d / 2 inside inner.
SandwichPair outer_approximation(const VPolytope& inner, double eps,
                                 double R_out, const AffineMap& frame);

/// Image of P under an affine map.
VPolytope map_polytope(const VPolytope& P, const AffineMap& L);

struct CheckReport {
  bool pass = true;
  int checked = 0;
  int violations = 0;
  double worst = 0.0;  // largest shortfall seen
  std::vector<Vec> failing;  // first few offending directions
};

/// Widths of P against (1 - eps) times those of L(K), where L is `frame`
/// (identity when null), over quasi-uniform directions, slack 1e-9.
CheckReport kernel_width_check(const VPolytope& P, const BodySpec& spec,
                               double eps, int num_dirs,
                               const AffineMap* frame = nullptr);

/// Largest distance from a support point of L(K) to P, over num_dirs
/// directions. For P inside L(K) this is their Hausdorff distance.
CheckReport hausdorff_check(const VPolytope& P, const BodySpec& spec,
                            double bound, int num_dirs = 10000,
                            const AffineMap* frame = nullptr);

struct NikodymEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo Vol(K sym-diff P) / Vol(K) over a bounding box, using the
/// analytic predicate only.
NikodymEstimate nikodym_estimate(const VPolytope& P, const BodySpec& spec,
                                 int samples, std::uint64_t seed = 2024);

}  // namespace memvol
