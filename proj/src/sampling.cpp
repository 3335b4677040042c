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

#include "memvol/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace memvol {

namespace {

double cone_volume(const VPolytope& P, const VPolytope::Simplex& s) {
  const int d = P.dim();
  Mat A(d, d);
  for (int i = 0; i < d; ++i)
    A.col(i) = P.vertices()[s[i]] - P.interior_point();
  return std::abs(A.determinant());
}

}  // namespace

PolytopeSampler::PolytopeSampler(const VPolytope& P) : P_(&P) {
  const auto& S = P.boundary_simplices();
  if (S.empty()) throw ContractViolation("PolytopeSampler: empty polytope");
  cumulative_.reserve(S.size());
  double acc = 0.0;
  for (const auto& s : S) {
    acc += cone_volume(P, s);
    cumulative_.push_back(acc);
  }
  double fact = 1.0;
  for (int i = 2; i <= P.dim(); ++i) fact *= i;
  volume_ = acc / fact;
}

Vec PolytopeSampler::operator()(std::mt19937_64& rng) const {
  const int d = P_->dim();
  std::uniform_real_distribution<double> U(0.0, cumulative_.back());
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), U(rng));
  const std::size_t k =
      std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
  const auto& s = P_->boundary_simplices()[k];

  // Flat Dirichlet weights over the apex and the d simplex vertices.
  std::exponential_distribution<double> E(1.0);
  double w[kMaxDim + 1];
  double total = 0.0;
  for (int i = 0; i <= d; ++i) total += (w[i] = E(rng));
  Vec x = (w[d] / total) * P_->interior_point();
  for (int i = 0; i < d; ++i) x += (w[i] / total) * P_->vertices()[s[i]];
  return x;
}

Vec sample_uniform_polytope(const VPolytope& P, std::mt19937_64& rng) {
  return PolytopeSampler(P)(rng);
}

ShellSampler::ShellSampler(const SandwichPair& pair) : inner_(&pair.inner) {
  const VPolytope& P = pair.inner;
  const VPolytope& Q = pair.outer;
  const int d = P.dim();
  const auto& V = P.vertices();
  if (V.empty() || Q.vertices().size() != V.size())
    throw ContractViolation("ShellSampler: outer is not a scaled copy of inner");
  lambda_ = Q.vertices()[0].norm() / V[0].norm();
  for (std::size_t i = 0; i < V.size(); ++i)
    if ((Q.vertices()[i] - lambda_ * V[i]).norm() >
        tol::kGeometric * (1.0 + Q.vertices()[i].norm()))
      throw ContractViolation(
          "ShellSampler: outer is not a scaled copy of inner");
  lambda_d_ = std::pow(lambda_, d);
  if (!(lambda_d_ - 1.0 > tol::kGeometric))
    throw EstimatorError("ShellSampler: the shell is degenerate (lambda^d - 1 = " +
                         std::to_string(lambda_d_ - 1.0) + ")");
  double acc = 0.0;
  for (const auto& s : P.boundary_simplices()) {
    Mat A(d, d);
    for (int c = 0; c < d; ++c) A.col(c) = V[s[c]];
    acc += std::abs(A.determinant());
    cumulative_.push_back(acc);
  }
  if (cumulative_.empty() || !(acc > 0.0))
    throw ContractViolation("ShellSampler: empty inner polytope");
}

Vec ShellSampler::operator()(std::mt19937_64& rng) const {
  const int d = inner_->dim();
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(),
                                   U(rng) * cumulative_.back());
  const std::size_t k =
      std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
  const auto& s = inner_->boundary_simplices()[k];

  std::exponential_distribution<double> E(1.0);
  double w[kMaxDim];
  double total = 0.0;
  for (int i = 0; i < d; ++i) total += (w[i] = E(rng));
  Vec y = Vec::Zero(d);
  for (int i = 0; i < d; ++i) y += (w[i] / total) * inner_->vertices()[s[i]];
  const double t = std::pow(1.0 + U(rng) * (lambda_d_ - 1.0), 1.0 / d);
  return t * y;
}

Vec sample_shell_rejection(const SandwichPair& pair,
                           const PolytopeSampler& outer, std::mt19937_64& rng,
                           long budget) {
  for (long i = 0; i < budget; ++i) {
    Vec x = outer(rng);
    if (!polytope_contains(pair.inner, x, 0.0)) return x;
  }
  throw EstimatorError("sample_shell: no shell point after " +
                       std::to_string(budget) +
                       " draws; the shell is degenerate");
}

Vec sample_shell(const SandwichPair& pair, std::mt19937_64& rng) {
  return ShellSampler(pair)(rng);
}

}  // namespace memvol
