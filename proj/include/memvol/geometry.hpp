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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "memvol/types.hpp"

namespace memvol {

/// Volume of the unit ball in dimension d, pi^(d/2) / Gamma(d/2 + 1).
double ball_volume(int d);

/// Invertible affine map x -> x0 + T x.
class AffineMap {
 public:
  AffineMap(Mat T, Vec x0);

  static AffineMap identity(int d);
  static AffineMap scaling(int d, double s);
  static AffineMap translation(const Vec& t);

  int dim() const { return static_cast<int>(x0_.size()); }
  const Mat& matrix() const { return T_; }
  const Vec& offset() const { return x0_; }
  double det() const { return det_; }

  Vec apply(const Vec& x) const { return x0_ + T_ * x; }
  Vec apply_inverse(const Vec& y) const { return Tinv_ * (y - x0_); }
  // Linear part only, for directions.
  Vec apply_linear(const Vec& v) const { return T_ * v; }

  AffineMap inverse() const;
  // (this o other)(x) = this(other(x))
  AffineMap compose(const AffineMap& other) const;

  nlohmann::json to_json() const;
  static AffineMap from_json(const nlohmann::json& j);

 private:
  Mat T_;
  Mat Tinv_;
  Vec x0_;
  double det_;
};

// ---------------------------------------------------------------------------
// Spherical caps

/// Cap of the unit ball around the unit vector `center`, cut off at chordal
/// radius `radius` measured on the sphere.
struct SphericalCap {
  Vec center;
  double radius;

  SphericalCap(Vec v, double r);
  double threshold() const { return 1.0 - 0.5 * radius * radius; }
};

bool cap_contains(const SphericalCap& cap, const Vec& x);

/// Volume of a cap of chordal radius r in the unit d-ball. Evaluated by
/// adaptive Gauss-Kronrod quadrature on the height profile.
double cap_volume(int d, double r);

// ---------------------------------------------------------------------------
// Nets

struct Net {
  int dim = 0;
  double sphere_radius = 1.0;
  double delta = 1.0;
  Points points;
  // Empirical covering radius is at most delta * (1 + covering_slack).
  double covering_slack = 0.0;

  std::size_t size() const { return points.size(); }
};

/// Builds a delta-net of the sphere of radius rho in R^d, 2 <= d <= 6.
///   d = 2: equally spaced points (exact covering, slack 0).
///   d = 3: spherical Fibonacci lattice, largest size keeping separation.
///   d >= 4: greedy maximal packing over a quasi-uniform candidate sample
///           of spacing delta/10.
Net build_delta_net(int d, double delta, double rho);

/// Exact minimum pairwise distance (grid-accelerated, all close pairs).
double net_min_separation(const Net& net);

/// Largest distance from any of `num_probes` quasi-uniform sphere probes to
/// its nearest net point.
double net_covering_radius(const Net& net, int num_probes,
                           std::uint64_t seed = 12345);

/// Quasi-uniform points on the sphere of radius rho (Fibonacci lattice for
/// d = 3, equispaced for d = 2, seeded normalized Gaussians otherwise).
Points sphere_sample(int d, int n, double rho, std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// Polytopes

struct Halfspace {
  Vec normal;  // outward, unit length
  double offset;
};

/// Vertex-represented polytope. Facets are derived from the hull and kept
/// both as a simplicial boundary (for volume and sampling) and as merged
/// halfspaces (for containment).
class VPolytope {
 public:
  using Simplex = std::array<int, kMaxDim>;

  VPolytope() = default;

  int dim() const { return dim_; }
  const Points& vertices() const { return vertices_; }
  const std::vector<Halfspace>& facets() const { return facets_; }
  const Vec& interior_point() const { return interior_; }
  // Each boundary simplex lists dim() indices into vertices().
  const std::vector<Simplex>& boundary_simplices() const { return simplices_; }

  nlohmann::json to_json() const;
  static VPolytope from_json(const nlohmann::json& j);

 private:
  friend VPolytope convex_hull(std::span<const Vec> points, int d);
  friend VPolytope scale_polytope(const VPolytope& P, double lambda);
  friend bool polytope_contains(const VPolytope& P, const Vec& x,
                                double slack);

  int dim_ = 0;
  Points vertices_;
  std::vector<Halfspace> facets_;
  std::vector<Simplex> simplices_;
  Vec interior_;
  // d = 2 only: angle of each vertex about interior_, ascending. Vertices and
  // facets are stored so that facet k is the edge from vertex k to k+1.
  std::vector<double> angles_;
};

/// Convex hull of a point set in R^d (2 <= d <= 6). Throws DegenerateInput
/// naming the affine rank when the points do not span R^d.
VPolytope convex_hull(std::span<const Vec> points, int d);

double polytope_volume(const VPolytope& P);

bool polytope_contains(const VPolytope& P, const Vec& x,
                       double slack = tol::kGeometric);

/// Scales about the origin. The origin must be strictly inside P.
VPolytope scale_polytope(const VPolytope& P, double lambda);

/// max_v u.v - min_v u.v over the vertices.
double directional_width(const VPolytope& P, const Vec& u);

double support_value(const VPolytope& P, const Vec& u);

/// Euclidean distance from x to P (0 when inside), via exact projection onto
/// the facet halfspaces.
double distance_to_polytope(const VPolytope& P, const Vec& x);

/// Euclidean projection of x onto the intersection of halfspaces (active-set
/// method; exact up to round-off for the small systems used here).
Vec project_onto_halfspaces(const Vec& x, std::span<const Halfspace> hs);

// ---------------------------------------------------------------------------
// Minimum-volume enclosing ellipsoid

/// Ellipsoid {x : (x - center)^T shape (x - center) <= 1}.
struct EllipsoidShape {
  Vec center;
  Mat shape;
};

/// Khachiyan's barycentric coordinate ascent, stopped at relative tolerance
/// `tolerance` on the optimality gap; the result is then inflated so that
/// every input point is enclosed.
EllipsoidShape mvee(std::span<const Vec> points,
                    double tolerance = tol::kMvee);

/// Affine map sending the ellipsoid onto the unit ball.
AffineMap ellipsoid_to_ball(const EllipsoidShape& e);

int affine_rank(std::span<const Vec> points, int d);

}  // namespace memvol
