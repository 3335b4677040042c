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
#include <random>
#include <vector>

#include "memvol/kernel.hpp"

namespace memvol {

/// Exact uniform sampler for a VPolytope. The polytope is split into cones
/// from its interior point over the boundary simplices; a cone is picked with
/// probability proportional to its volume and a point is drawn from flat
/// Dirichlet barycentrics.
class PolytopeSampler {
 public:
  explicit PolytopeSampler(const VPolytope& P);

  Vec operator()(std::mt19937_64& rng) const;

  double volume() const { return volume_; }
  const VPolytope& polytope() const { return *P_; }

 private:
  const VPolytope* P_;
  std::vector<double> cumulative_;
  double volume_ = 0.0;
};

/// One uniform point of P. Builds a sampler per call; keep a PolytopeSampler
/// around when drawing many.
Vec sample_uniform_polytope(const VPolytope& P, std::mt19937_64& rng);

/// Exact uniform sampler for outer minus inner when outer = lambda * inner
/// about the origin. The shell is the union of the frusta
/// {t y : y in S, 1 <= t <= lambda} over the boundary simplices S of inner;
/// a frustum is picked by its cone volume, y is uniform on S and t^d is
/// uniform on [1, lambda^d]. Throws EstimatorError for a shell thinner than
/// rounding error.
class ShellSampler {
 public:
  explicit ShellSampler(const SandwichPair& pair);

  Vec operator()(std::mt19937_64& rng) const;

  double lambda() const { return lambda_; }

 private:
  const VPolytope* inner_;
  std::vector<double> cumulative_;
  double lambda_ = 1.0;
  double lambda_d_ = 1.0;
};

/// One uniform shell point. Builds a sampler per call.
Vec sample_shell(const SandwichPair& pair, std::mt19937_64& rng);

/// Uniform shell point by rejection from outer, for cross-checking the
/// frustum sampler. Throws EstimatorError after `budget` rejections.
Vec sample_shell_rejection(const SandwichPair& pair,
                           const PolytopeSampler& outer, std::mt19937_64& rng,
                           long budget = 1000000);

}  // namespace memvol
