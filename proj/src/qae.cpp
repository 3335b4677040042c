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

#include "memvol/qae.hpp"

#include <algorithm>

#include "memvol/types.hpp"

namespace memvol {

namespace {

// Fejer kernel sin^2(M pi D) / (M^2 sin^2(pi D)); equals 1 at D = 0.
double fejer(double D, int M) {
  const double s = std::sin(std::numbers::pi * D);
  if (std::abs(s) < 1e-15) return 1.0;
  const double t = std::sin(M * std::numbers::pi * D);
  return (t * t) / (static_cast<double>(M) * M * s * s);
}

double circular(double x) {
  x -= std::floor(x);
  return std::min(x, 1.0 - x);
}

}  // namespace

std::vector<double> qae_distribution(double a, int M) {
  if (M < 1) throw ContractViolation("qae_distribution: M must be >= 1");
  if (!(a >= 0.0 && a <= 1.0))
    throw ContractViolation("qae_distribution: a must lie in [0, 1]");
  std::vector<double> p(M, 0.0);
  // a = 0 is a fixed point of the Grover iterate. a = 1 is exact only when
  // M is even, since then y = M/2 carries the whole mass.
  if (a == 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double theta = std::asin(std::sqrt(a)) / std::numbers::pi;
  // Both eigenphases +-theta appear with weight 1/2.
  double total = 0.0;
  for (int y = 0; y < M; ++y) {
    const double u = static_cast<double>(y) / M;
    p[y] = 0.5 * fejer(circular(u - theta), M) +
           0.5 * fejer(circular(u + theta), M);
    total += p[y];
  }
  for (auto& v : p) v /= total;
  return p;
}

double qae_sample(double a, int M, std::mt19937_64& rng) {
  if (a == 0.0) return 0.0;
  const auto p = qae_distribution(a, M);
  std::discrete_distribution<int> dist(p.begin(), p.end());
  return qae_estimate(dist(rng), M);
}

double qae_envelope(double a, int M) {
  const double pi = std::numbers::pi;
  return 2.0 * pi * std::sqrt(a * (1.0 - a)) / M + pi * pi / (1.0 * M * M);
}

}  // namespace memvol
