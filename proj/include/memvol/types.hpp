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
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace memvol {

// Highest dimension supported anywhere in the library. Vectors and small
// matrices use Eigen's fixed-capacity storage so that the hot paths
// (membership, projection, hull) never touch the heap.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim,
                          kMaxDim>;
using Points = std::vector<Vec>;

namespace tol {
inline constexpr double kGeometric = 1e-9;
inline constexpr double kQuadrature = 1e-12;
inline constexpr double kMvee = 1e-6;
inline constexpr double kFacetMerge = 1e-7;
inline constexpr double kUnitNorm = 1e-12;
inline constexpr double kSingular = 1e-12;
}  // namespace tol

// Caller broke a documented precondition (wrong dimension, bad parameter).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested operation is not defined for this input kind.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An algorithm ran but could not produce a result satisfying its contract.
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateInput : public EstimatorError {
 public:
  DegenerateInput(const std::string& what, int rank)
      : EstimatorError(what), rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

inline Vec unit_vector(int d, int axis) {
  Vec e = Vec::Zero(d);
  e[axis] = 1.0;
  return e;
}

}  // namespace memvol
