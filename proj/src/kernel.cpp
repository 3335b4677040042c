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

#include "memvol/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include "memvol/projection.hpp"
#include "memvol/rounding.hpp"

namespace memvol {

Points project_points(const OracleHandle& h, std::span<const Vec> xs,
                      double eps, double R, Exec exec) {
  const long n = static_cast<long>(xs.size());
  Points out(xs.size());
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i)
      out[i] = approximate_projection(h, xs[i], eps, R);
    return out;
  }
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = approximate_projection(h, xs[i], eps, R);
    } catch (...) {
#pragma omp critical(memvol_project_err)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

VPolytope kernel_rounded(const OracleHandle& h, int d, double eps, double R,
                         Exec exec) {
  if (h.dim() != d) throw ContractViolation("kernel_rounded: dimension mismatch");
  if (!(eps > 0.0 && eps < 1.0))
    throw ContractViolation("kernel_rounded: eps must lie in (0, 1)");
  if (!(R >= 1.0)) throw ContractViolation("kernel_rounded: need R >= 1");
  const double eta = std::sqrt(eps / R);
  const Net net = build_delta_net(d, eta, R + 1.0);
  const Points p = project_points(h, net.points, eps, R, exec);
  return convex_hull(p, d);
}

RoundedKernel construct_kernel(const OracleHandle& h, int d, double eps,
                               double R, Exec exec) {
  const Rounding r = round_body(h, R);
  const OracleHandle hL = transformed_oracle(h, r.L);
  return {kernel_rounded(hL, d, eps, r.R_out, exec), r.L, r.R_out};
}

SandwichPair outer_approximation(const VPolytope& inner, double eps,
                                 double R_out, const AffineMap& frame) {
  const int d = inner.dim();
  if (!(eps > 0.0) || !(4.0 * eps * R_out < 1.0))
    throw ContractViolation("outer_approximation: need 0 < eps < 1/(4 R_out)");
  // Facet offsets are distances from the origin, so B_d/2 inside inner is
  // exactly min offset >= 1/2.
  double inr = std::numeric_limits<double>::infinity();
  for (const auto& f : inner.facets()) inr = std::min(inr, f.offset);
  if (!(inr >= 0.5 - tol::kGeometric))
    throw EstimatorError("outer_approximation: B_d/2 is not inside the inner "
                         "polytope (inradius " + std::to_string(inr) + ")");
  const double lam = 1.0 + 4.0 * eps * R_out;
  SandwichPair s{inner, scale_polytope(inner, lam), std::pow(lam, d) - 1.0,
                 frame};
  return s;
}

VPolytope map_polytope(const VPolytope& P, const AffineMap& L) {
  Points v;
  v.reserve(P.vertices().size());
  for (const auto& x : P.vertices()) v.push_back(L.apply(x));
  return convex_hull(v, P.dim());
}

namespace {

// Support of L(K) in unit direction u: u.x0 + h_K(T^T u).
double mapped_support(const BodySpec& spec, const Vec& u, const AffineMap* L) {
  if (!L) return analytic_support(spec, u);
  const Vec w = L->matrix().transpose() * u;
  const double s = w.norm();
  return u.dot(L->offset()) + s * analytic_support(spec, w / s);
}

void note_failure(CheckReport& r, const Vec& u, double shortfall) {
  r.pass = false;
  ++r.violations;
  r.worst = std::max(r.worst, shortfall);
  if (r.failing.size() < 8) r.failing.push_back(u);
}

}  // namespace

CheckReport kernel_width_check(const VPolytope& P, const BodySpec& spec,
                               double eps, int num_dirs,
                               const AffineMap* frame) {
  CheckReport r;
  const Points dirs = sphere_sample(spec.dim, num_dirs, 1.0, 31);
  for (const auto& u : dirs) {
    const double wk = mapped_support(spec, u, frame) +
                      mapped_support(spec, -u, frame);
    const double need = (1.0 - eps) * wk - 1e-9;
    const double got = directional_width(P, u);
    ++r.checked;
    if (got < need) note_failure(r, u, need - got);
  }
  return r;
}

CheckReport hausdorff_check(const VPolytope& P, const BodySpec& spec,
                            double bound, int num_dirs,
                            const AffineMap* frame) {
  CheckReport r;
  const Points dirs = sphere_sample(spec.dim, num_dirs, 1.0, 37);
  for (const auto& u : dirs) {
    const double gap = mapped_support(spec, u, frame) - support_value(P, u);
    ++r.checked;
    r.worst = std::max(r.worst, gap);
    if (gap > bound) note_failure(r, u, gap);
  }
  return r;
}

NikodymEstimate nikodym_estimate(const VPolytope& P, const BodySpec& spec,
                                 int samples, std::uint64_t seed) {
  const int d = spec.dim;
  if (samples < 2) throw ContractViolation("nikodym_estimate: samples < 2");
  Vec lo = Vec::Constant(d, -spec.outer_radius);
  Vec hi = Vec::Constant(d, spec.outer_radius);
  for (const auto& v : P.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double box = (hi - lo).prod();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  long hits = 0;
  Vec x(d);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * U(rng);
    if (spec_contains(spec, x) != polytope_contains(P, x, 0.0)) ++hits;
  }
  const double p = static_cast<double>(hits) / samples;
  const double scale = box / analytic_volume(spec);
  return {p * scale, std::sqrt(p * (1.0 - p) / samples) * scale};
}

}  // namespace memvol
