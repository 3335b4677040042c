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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace memvol {

/// Outcome law of M-point amplitude estimation for amplitude a: probability
/// of each y in {0, ..., M-1}.
std::vector<double> qae_distribution(double a, int M);

/// Estimate attached to outcome y.
inline double qae_estimate(int y, int M) {
  const double s = std::sin(std::numbers::pi * y / M);
  return s * s;
}

/// One draw of the estimate.
double qae_sample(double a, int M, std::mt19937_64& rng);

/// 2 pi sqrt(a(1-a))/M + pi^2/M^2.
double qae_envelope(double a, int M);

}  // namespace memvol
