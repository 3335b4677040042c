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

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "memvol/oracle.hpp"

namespace memvol {

/// Raised when the projection loop runs out of budget. Carries the best
/// feasible iterate found and its distance to x.
class ProjectionError : public EstimatorError {
 public:
  ProjectionError(const std::string& what, Vec best, double bound)
      : EstimatorError(what), best_(std::move(best)), bound_(bound) {}
  const Vec& best() const { return best_; }
  double bound() const { return bound_; }

 private:
  Vec best_;
  double bound_;
};

/// t u with t in [rho(u) - tol, rho(u)], found by bisection on [1, R].
/// Requires B_d inside the body; throws EstimatorError if u is not a member.
Vec radial_boundary_point(const OracleHandle& h, const Vec& u, double tol,
                          double R);

struct ProjectionStats {
  int iterations = 0;
  int cuts = 0;
  std::uint64_t queries = 0;
};

/// Point of the body within eps of the Euclidean projection of x. The body
/// must satisfy B_d in K in R B_d.
Vec approximate_projection(const OracleHandle& h, const Vec& x, double eps,
                           double R, ProjectionStats* stats = nullptr);

/// Measured constant C_d in the query bound C_d log^2(R |x| / eps).
double projection_query_constant(int d);

inline double projection_query_bound(int d, double R, double xnorm,
                                     double eps) {
  const double L = std::log(std::max(2.0, R * std::max(1.0, xnorm) / eps));
  return projection_query_constant(d) * L * L;
}

}  // namespace memvol
