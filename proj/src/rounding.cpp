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

// Rounding from a coarse kernel: MVEE of its vertices, then an exact
// inradius rescale so the unit ball sits inside the kernel image.

#include "memvol/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "memvol/kernel.hpp"

namespace memvol {

void verify_sandwich(const OracleHandle& h, double R_out, int num_probes,
                     std::uint64_t seed) {
  const int d = h.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < num_probes; ++k) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = g(rng);
    x *= std::pow(U(rng), 1.0 / d) / x.norm();
    if (!membership(h, x))
      throw SandwichError("round_body: a point of B_d is not in L(K)", x);
  }
  for (const Vec& u : sphere_sample(d, num_probes, 1.0, seed + 1)) {
    if (membership(h, (R_out * (1.0 + 1e-9)) * u))
      throw SandwichError("round_body: L(K) reaches beyond R_out", u);
  }
}

namespace {

Rounding round_with(const OracleHandle& h, double R, double eps0) {
  const int d = h.dim();
  const VPolytope P = kernel_rounded(h, d, eps0, R);
  const EllipsoidShape E = mvee(P.vertices());
  const AffineMap M = ellipsoid_to_ball(E);
  const VPolytope Q = map_polytope(P, M);
  double inr = std::numeric_limits<double>::infinity();
  for (const auto& f : Q.facets()) inr = std::min(inr, f.offset);
  if (!(inr > 0.0))
    throw EstimatorError("round_body: origin not interior to kernel image");
  const double s = 1.0 / inr;
  const AffineMap L = AffineMap::scaling(d, s).compose(M);

  // Widths of the kernel are within a factor 1 - eps0 of those of K, so
  // h_K(u) <= max |v| + eps0 / (1 - eps0) * diam(kernel).
  double vmax = 0.0, diam = 0.0;
  const auto& V = Q.vertices();
  for (std::size_t i = 0; i < V.size(); ++i) {
    vmax = std::max(vmax, s * V[i].norm());
    for (std::size_t j = i + 1; j < V.size(); ++j)
      diam = std::max(diam, s * (V[i] - V[j]).norm());
  }
  const double R_out = std::max(1.0, vmax + eps0 / (1.0 - eps0) * diam);
  return {L, R_out, eps0};
}

}  // namespace

Rounding round_body(const OracleHandle& h, double R) {
  if (!(R >= 1.0)) throw ContractViolation("round_body: need R >= 1");
  // The input sandwich B_d in K in R B_d holds by precondition; keep it when
  // the candidate map would not tighten it.
  const Rounding keep{AffineMap::identity(h.dim()), R, 0.0};
  Rounding r = round_with(h, R, 0.25);
  if (R <= r.R_out) return keep;
  try {
    verify_sandwich(transformed_oracle(h, r.L), r.R_out);
    return r;
  } catch (const SandwichError&) {
  }
  r = round_with(h, R, 0.125);
  if (R <= r.R_out) return keep;
  verify_sandwich(transformed_oracle(h, r.L), r.R_out);
  return r;
}

}  // namespace memvol
