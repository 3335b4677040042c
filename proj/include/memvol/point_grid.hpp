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
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "memvol/types.hpp"

namespace memvol {

/// Uniform hash grid over R^d. Any point within `cell` of a query lies in
/// one of the 3^d cells around it.
class PointGrid {
 public:
  PointGrid(int d, double cell) : d_(d), cell_(cell) {}

  PointGrid(const Points& pts, double cell)
      : PointGrid(pts.empty() ? 0 : static_cast<int>(pts[0].size()), cell) {
    for (const auto& p : pts) insert(p);
  }

  int insert(const Vec& p) {
    const int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    cells_[key(coords(p))].push_back(id);
    return id;
  }

  const Points& points() const { return pts_; }
  double cell() const { return cell_; }

  // Calls f(index) for every stored point in the neighbouring cells of x.
  // Returns early once f returns false.
  template <class F>
  bool for_each_near(const Vec& x, F&& f) const {
    const auto c = coords(x);
    std::array<std::int64_t, kMaxDim> off{};
    off.fill(-1);
    while (true) {
      std::array<std::int64_t, kMaxDim> q = c;
      for (int i = 0; i < d_; ++i) q[i] += off[i];
      const auto it = cells_.find(key(q));
      if (it != cells_.end())
        for (int id : it->second)
          if (!f(id)) return false;
      int i = 0;
      while (i < d_ && off[i] == 1) off[i++] = -1;
      if (i == d_) break;
      ++off[i];
    }
    return true;
  }

  // Exact nearest stored point; -1 if empty.
  int nearest(const Vec& x, double* dist = nullptr) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for_each_near(x, [&](int id) {
      const double t = (pts_[id] - x).squaredNorm();
      if (t < bd) {
        bd = t;
        best = id;
      }
      return true;
    });
    if (best < 0 || bd > cell_ * cell_) {
      for (int id = 0; id < static_cast<int>(pts_.size()); ++id) {
        const double t = (pts_[id] - x).squaredNorm();
        if (t < bd) {
          bd = t;
          best = id;
        }
      }
    }
    if (dist) *dist = std::sqrt(bd);
    return best;
  }

 private:
  std::array<std::int64_t, kMaxDim> coords(const Vec& x) const {
    std::array<std::int64_t, kMaxDim> c{};
    for (int i = 0; i < d_; ++i)
      c[i] = static_cast<std::int64_t>(std::floor(x[i] / cell_));
    return c;
  }
  std::uint64_t key(const std::array<std::int64_t, kMaxDim>& c) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < d_; ++i) {
      h ^= static_cast<std::uint64_t>(c[i]) + 0x9e3779b97f4a7c15ull + (h << 6) +
           (h >> 2);
      h *= 1099511628211ull;
    }
    return h;
  }

  int d_;
  double cell_;
  Points pts_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace memvol
