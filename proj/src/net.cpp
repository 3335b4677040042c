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

// Delta-nets on spheres and quasi-uniform sphere samples.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>

#include "memvol/geometry.hpp"
#include "memvol/point_grid.hpp"

namespace memvol {

namespace {

constexpr int kCoverProbes = 4096;
constexpr std::size_t kMaxCandidates = 400000;

Points fibonacci_sphere(int n, double rho) {
  Points out;
  out.reserve(n);
  const double golden = std::numbers::phi;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * std::numbers::pi * i / golden;
    Vec p(3);
    p << r * std::cos(phi), r * std::sin(phi), z;
    out.push_back(rho * p);
  }
  return out;
}

Points circle_points(int n, double rho, double phase) {
  Points out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = phase + 2.0 * std::numbers::pi * i / n;
    Vec p(2);
    p << rho * std::cos(t), rho * std::sin(t);
    out.push_back(p);
  }
  return out;
}

Points gaussian_sphere(int d, std::size_t n, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Points out;
  out.reserve(n);
  while (out.size() < n) {
    Vec p(d);
    for (int i = 0; i < d; ++i) p[i] = g(rng);
    const double len = p.norm();
    if (len < 1e-12) continue;
    out.push_back(rho * p / len);
  }
  return out;
}

double sphere_area(int d, double rho) {
  // Surface area of the radius-rho sphere in R^d.
  return d * ball_volume(d) * std::pow(rho, d - 1);
}

Points greedy_packing(const Points& candidates, int d, double delta) {
  PointGrid grid(d, delta);
  for (const auto& c : candidates) {
    bool ok = true;
    grid.for_each_near(c, [&](int id) {
      if ((grid.points()[id] - c).norm() < delta) ok = false;
      return ok;
    });
    if (ok) grid.insert(c);
  }
  return grid.points();
}

}  // namespace

Points sphere_sample(int d, int n, double rho, std::uint64_t seed) {
  if (d < 2 || d > kMaxDim || n < 1 || !(rho > 0.0))
    throw ContractViolation("sphere_sample: bad arguments");
  if (d == 2) {
    std::mt19937_64 rng(seed);
    const double phase = std::uniform_real_distribution<double>(
        0.0, 2.0 * std::numbers::pi / n)(rng);
    return circle_points(n, rho, phase);
  }
  if (d == 3) {
    // Seeded random rotation of the Fibonacci lattice.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::Matrix3d A;
    for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = g(rng);
    const Eigen::Matrix3d Q = Eigen::HouseholderQR<Eigen::Matrix3d>(A).householderQ();
    Points pts = fibonacci_sphere(n, rho);
    for (auto& p : pts) p = Vec(Q * p.head<3>());
    return pts;
  }
  return gaussian_sphere(d, n, rho, seed);
}

Net build_delta_net(int d, double delta, double rho) {
  if (d < 2 || d > kMaxDim)
    throw ContractViolation("build_delta_net: dimension must be in [2, 6]");
  if (!(rho > 0.0) || !(delta > 0.0) || delta > 2.0 * rho)
    throw ContractViolation("build_delta_net: need 0 < delta <= 2 rho");

  Net net;
  net.dim = d;
  net.sphere_radius = rho;
  net.delta = delta;

  if (d == 2) {
    const double s = std::min(1.0, delta / (2.0 * rho));
    int n = std::max(2, static_cast<int>(std::floor(std::numbers::pi / std::asin(s))));
    while (n > 2 && 2.0 * rho * std::sin(std::numbers::pi / n) < delta) --n;
    net.points = circle_points(n, rho, 0.0);
    net.covering_slack = 0.0;
    return net;
  }

  if (d == 3) {
    // Fibonacci lattices separate at about 3.09 rho / sqrt(n); shrink n until
    // the exact separation clears delta.
    int n = static_cast<int>(std::floor(1.02 * std::pow(3.09 * rho / delta, 2)));
    while (n >= 32) {
      net.points = fibonacci_sphere(n, rho);
      if (net_min_separation(net) >= delta) break;
      n = static_cast<int>(std::floor(n * 0.99));
    }
    if (n >= 32) {
      net.covering_slack = 0.1;
      if (net_covering_radius(net, kCoverProbes) <= delta * 1.1) return net;
    }
  }

  // Greedy maximal packing over a quasi-uniform candidate set of spacing
  // delta / 10, capped in size.
  const double spacing = delta / 10.0;
  double want = sphere_area(d, rho) / std::pow(spacing, d - 1);
  const std::size_t count = static_cast<std::size_t>(
      std::clamp(want, 64.0, static_cast<double>(kMaxCandidates)));
  Points cand = d == 3 ? fibonacci_sphere(static_cast<int>(count), rho)
                       : gaussian_sphere(d, count, rho, 0x5eedULL + d);
  net.points = greedy_packing(cand, d, delta);
  const double cover = net_covering_radius(net, kCoverProbes);
  net.covering_slack = std::max(0.1, cover / delta - 1.0);
  if (net.covering_slack > 0.5)
    throw EstimatorError("build_delta_net: covering radius " +
                         std::to_string(cover) + " exceeds 1.5 delta");
  return net;
}

double net_min_separation(const Net& net) {
  const Points& P = net.points;
  const std::size_t n = P.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  if (n <= 2000) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        best = std::min(best, (P[i] - P[j]).norm());
    return best;
  }
  // Any pair closer than the cell size shares neighbouring cells; double the
  // cell until some pair is found.
  for (double h = net.delta; ; h *= 2.0) {
    PointGrid grid(net.dim, h);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : P) {
      grid.for_each_near(p, [&](int id) {
        best = std::min(best, (grid.points()[id] - p).norm());
        return true;
      });
      grid.insert(p);
    }
    if (best < h) return best;
  }
}

double net_covering_radius(const Net& net, int num_probes, std::uint64_t seed) {
  if (net.points.empty()) return std::numeric_limits<double>::infinity();
  const PointGrid grid(net.points, 1.5 * net.delta);
  const Points probes = sphere_sample(net.dim, num_probes, net.sphere_radius, seed);
  double worst = 0.0;
  for (const auto& q : probes) {
    double dist = 0.0;
    grid.nearest(q, &dist);
    worst = std::max(worst, dist);
  }
  return worst;
}

}  // namespace memvol
