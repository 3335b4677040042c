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

// Convex hulls: Andrew's monotone chain in the plane, quickhull with conflict
// lists for 3 <= d <= 6.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "memvol/geometry.hpp"

namespace memvol {

namespace {

double cross2(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double coordinate_scale(std::span<const Vec> pts) {
  double s = 1.0;
  for (const auto& p : pts) s = std::max(s, p.lpNorm<Eigen::Infinity>());
  return s;
}

struct QFacet {
  VPolytope::Simplex v{};
  std::array<int, kMaxDim> nb{};
  Vec normal;
  double offset = 0.0;
  std::vector<int> outside;
  int furthest = -1;
  double furthest_dist = 0.0;
  int stamp = -1;
  bool alive = false;
};

class Quickhull {
 public:
  Quickhull(std::span<const Vec> pts, int d)
      : pts_(pts), d_(d), eps_(1e-11 * coordinate_scale(pts)) {}

  void run();
  std::vector<VPolytope::Simplex> simplices() const;
  const Vec& interior() const { return interior_; }

 private:
  int new_facet(const VPolytope::Simplex& v);
  void compute_plane(QFacet& f) const;
  double dist(const QFacet& f, int p) const {
    return f.normal.dot(pts_[p]) - f.offset;
  }
  void add_outside(QFacet& f, int p, double dd) {
    f.outside.push_back(p);
    if (dd > f.furthest_dist) {
      f.furthest_dist = dd;
      f.furthest = p;
    }
  }
  std::vector<int> initial_simplex() const;
  void insert(int fi);

  std::span<const Vec> pts_;
  int d_;
  double eps_;
  Vec interior_;
  std::vector<QFacet> facets_;
  std::vector<int> free_;
  std::vector<int> pending_;
  int stamp_ = 0;
};

int Quickhull::new_facet(const VPolytope::Simplex& v) {
  int idx;
  if (!free_.empty()) {
    idx = free_.back();
    free_.pop_back();
  } else {
    idx = static_cast<int>(facets_.size());
    facets_.emplace_back();
  }
  QFacet& f = facets_[idx];
  f.v = v;
  f.nb.fill(-1);
  f.outside.clear();
  f.furthest = -1;
  f.furthest_dist = 0.0;
  f.stamp = -1;
  f.alive = true;
  compute_plane(f);
  return idx;
}

void Quickhull::compute_plane(QFacet& f) const {
  const Vec& o = pts_[f.v[0]];
  Vec n(d_);
  if (d_ == 3) {
    const Eigen::Vector3d a = (pts_[f.v[1]] - o).head<3>();
    const Eigen::Vector3d b = (pts_[f.v[2]] - o).head<3>();
    const Eigen::Vector3d c = a.cross(b);
    n = c;
  } else {
    Eigen::MatrixXd E(d_ - 1, d_);
    for (int i = 1; i < d_; ++i) E.row(i - 1) = (pts_[f.v[i]] - o).transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(E);
    const Eigen::MatrixXd ker = lu.kernel();
    n = ker.col(0);
  }
  const double len = n.norm();
  if (len > 0.0) n /= len;
  if (n.dot(interior_ - o) > 0.0) n = -n;
  f.normal = n;
  f.offset = n.dot(o);
}

std::vector<int> Quickhull::initial_simplex() const {
  const int n = static_cast<int>(pts_.size());
  int lo = 0, hi = 0;
  for (int i = 1; i < n; ++i) {
    if (pts_[i][0] < pts_[lo][0]) lo = i;
    if (pts_[i][0] > pts_[hi][0]) hi = i;
  }
  std::vector<int> chosen{lo};
  std::vector<Vec> basis;
  auto residual = [&](int i) {
    Vec r = pts_[i] - pts_[chosen[0]];
    for (const auto& b : basis) r -= b.dot(r) * b;
    return r;
  };
  for (int k = 1; k <= d_; ++k) {
    int best = -1;
    double best_norm = 0.0;
    if (k == 1 && hi != lo) {
      best = hi;
      best_norm = residual(hi).norm();
    }
    for (int i = 0; i < n; ++i) {
      const double r = residual(i).norm();
      if (r > best_norm * (1.0 + 1e-12)) {
        best_norm = r;
        best = i;
      }
    }
    if (best < 0 || best_norm <= 1e3 * eps_)
      throw DegenerateInput("convex_hull: input has affine rank " +
                                std::to_string(k - 1) + " < " +
                                std::to_string(d_),
                            k - 1);
    Vec r = residual(best);
    basis.push_back(r / r.norm());
    chosen.push_back(best);
  }
  return chosen;
}

void Quickhull::run() {
  const std::vector<int> simplex = initial_simplex();
  interior_ = Vec::Zero(d_);
  for (int i : simplex) interior_ += pts_[i];
  interior_ /= static_cast<double>(d_ + 1);

  // Facet j omits simplex vertex j; its ridge opposite simplex vertex m is
  // shared with facet m.
  facets_.reserve(4 * pts_.size() / std::max(1, 6 - d_) + 16);
  std::vector<int> ids(d_ + 1);
  for (int j = 0; j <= d_; ++j) {
    VPolytope::Simplex v{};
    int c = 0;
    for (int m = 0; m <= d_; ++m)
      if (m != j) v[c++] = simplex[m];
    ids[j] = new_facet(v);
  }
  for (int j = 0; j <= d_; ++j) {
    QFacet& f = facets_[ids[j]];
    for (int i = 0; i < d_; ++i) {
      const int m = static_cast<int>(
          std::find(simplex.begin(), simplex.end(), f.v[i]) - simplex.begin());
      f.nb[i] = ids[m];
    }
  }

  std::vector<char> in_simplex(pts_.size(), 0);
  for (int i : simplex) in_simplex[i] = 1;
  for (int p = 0; p < static_cast<int>(pts_.size()); ++p) {
    if (in_simplex[p]) continue;
    for (int id : ids) {
      const double dd = dist(facets_[id], p);
      if (dd > eps_) {
        add_outside(facets_[id], p, dd);
        break;
      }
    }
  }
  for (int id : ids)
    if (!facets_[id].outside.empty()) pending_.push_back(id);

  while (!pending_.empty()) {
    const int fi = pending_.back();
    pending_.pop_back();
    if (!facets_[fi].alive || facets_[fi].outside.empty()) continue;
    insert(fi);
  }
}

void Quickhull::insert(int fi) {
  const int p = facets_[fi].furthest;
  const int stamp = ++stamp_;

  std::vector<int> visible{fi};
  facets_[fi].stamp = stamp;
  for (std::size_t q = 0; q < visible.size(); ++q) {
    const QFacet& f = facets_[visible[q]];
    for (int i = 0; i < d_; ++i) {
      const int g = f.nb[i];
      if (facets_[g].stamp == stamp) continue;
      if (dist(facets_[g], p) > eps_) {
        facets_[g].stamp = stamp;
        visible.push_back(g);
      }
    }
  }

  struct Ridge {
    std::array<int, kMaxDim> key;
    int facet;
    int slot;
  };
  std::vector<Ridge> open;
  std::vector<int> created;
  for (int vi : visible) {
    for (int i = 0; i < d_; ++i) {
      const int g = facets_[vi].nb[i];
      if (facets_[g].stamp == stamp) continue;
      VPolytope::Simplex v = facets_[vi].v;
      v[i] = p;
      const int nf = new_facet(v);
      QFacet& F = facets_[nf];
      F.nb[i] = g;
      QFacet& G = facets_[g];
      for (int k = 0; k < d_; ++k)
        if (G.nb[k] == vi) G.nb[k] = nf;
      created.push_back(nf);
      // Ridges through p: drop one of the other vertices.
      for (int k = 0; k < d_; ++k) {
        if (k == i) continue;
        std::array<int, kMaxDim> key{};
        int c = 0;
        for (int m = 0; m < d_; ++m)
          if (m != k) key[c++] = F.v[m];
        std::sort(key.begin(), key.begin() + c);
        bool matched = false;
        for (auto it = open.begin(); it != open.end(); ++it) {
          if (std::equal(key.begin(), key.begin() + c, it->key.begin())) {
            F.nb[k] = it->facet;
            facets_[it->facet].nb[it->slot] = nf;
            open.erase(it);
            matched = true;
            break;
          }
        }
        if (!matched) open.push_back({key, nf, k});
      }
    }
  }

  for (int vi : visible) {
    QFacet& f = facets_[vi];
    for (int q : f.outside) {
      if (q == p) continue;
      for (int nf : created) {
        const double dd = dist(facets_[nf], q);
        if (dd > eps_) {
          add_outside(facets_[nf], q, dd);
          break;
        }
      }
    }
    f.outside.clear();
    f.outside.shrink_to_fit();
    f.alive = false;
    free_.push_back(vi);
  }
  for (int nf : created)
    if (!facets_[nf].outside.empty()) pending_.push_back(nf);
}

std::vector<VPolytope::Simplex> Quickhull::simplices() const {
  std::vector<VPolytope::Simplex> out;
  for (const auto& f : facets_)
    if (f.alive) out.push_back(f.v);
  return out;
}

}  // namespace

VPolytope convex_hull(std::span<const Vec> points, int d) {
  if (d < 2 || d > kMaxDim)
    throw ContractViolation("convex_hull: dimension must be in [2, 6]");
  for (const auto& p : points)
    if (p.size() != d) throw ContractViolation("convex_hull: dimension mismatch");
  if (static_cast<int>(points.size()) < d + 1)
    throw DegenerateInput("convex_hull: need at least d+1 points, affine rank " +
                              std::to_string(affine_rank(points, d)) + " < " +
                              std::to_string(d),
                          affine_rank(points, d));

  VPolytope P;
  P.dim_ = d;
  const double scale = coordinate_scale(points);

  if (d == 2) {
    std::vector<int> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return points[a][0] < points[b][0] ||
             (points[a][0] == points[b][0] && points[a][1] < points[b][1]);
    });
    // Pop the middle point when it is within 1e-12 * scale of the chord.
    const double eps = 1e-12 * scale;
    auto flat = [&](int o, int a, int b) {
      return cross2(points[o], points[a], points[b]) <=
             eps * (points[b] - points[o]).norm();
    };
    std::vector<int> hull(2 * order.size());
    std::size_t k = 0;
    for (int i : order) {
      while (k >= 2 && flat(hull[k - 2], hull[k - 1], i))
        --k;
      hull[k++] = i;
    }
    for (std::size_t t = order.size() - 1, lower = k + 1; t-- > 0;) {
      const int i = order[t];
      while (k >= lower && flat(hull[k - 2], hull[k - 1], i))
        --k;
      hull[k++] = i;
    }
    hull.resize(k > 0 ? k - 1 : 0);
    if (hull.size() < 3) {
      const int r = affine_rank(points, d);
      throw DegenerateInput("convex_hull: input has affine rank " +
                                std::to_string(r) + " < 2",
                            r);
    }
    Vec c = Vec::Zero(2);
    for (int i : hull) c += points[i];
    c /= static_cast<double>(hull.size());
    // Rotate so that vertex angles about c ascend from index 0.
    std::size_t start = 0;
    double min_ang = 10.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const double a = std::atan2(points[hull[i]][1] - c[1],
                                  points[hull[i]][0] - c[0]);
      if (a < min_ang) {
        min_ang = a;
        start = i;
      }
    }
    std::rotate(hull.begin(), hull.begin() + start, hull.end());
    const std::size_t n = hull.size();
    for (int i : hull) {
      P.vertices_.push_back(points[i]);
      P.angles_.push_back(std::atan2(points[i][1] - c[1], points[i][0] - c[0]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Vec& a = P.vertices_[i];
      const Vec& b = P.vertices_[(i + 1) % n];
      Vec nrm(2);
      nrm << b[1] - a[1], a[0] - b[0];
      nrm /= nrm.norm();
      P.facets_.push_back({nrm, nrm.dot(a)});
      VPolytope::Simplex s{};
      s[0] = static_cast<int>(i);
      s[1] = static_cast<int>((i + 1) % n);
      P.simplices_.push_back(s);
    }
    P.interior_ = c;
    return P;
  }

  Quickhull qh(points, d);
  qh.run();
  auto simplices = qh.simplices();

  std::vector<int> remap(points.size(), -1);
  for (auto& s : simplices) {
    for (int k = 0; k < d; ++k) {
      int& r = remap[s[k]];
      if (r < 0) {
        r = static_cast<int>(P.vertices_.size());
        P.vertices_.push_back(points[s[k]]);
      }
      s[k] = r;
    }
  }
  P.simplices_ = std::move(simplices);
  Vec c = Vec::Zero(d);
  for (const auto& v : P.vertices_) c += v;
  c /= static_cast<double>(P.vertices_.size());
  P.interior_ = c;

  // Facet planes, dropping slivers whose normals are numerically meaningless,
  // then merging coplanar simplices.
  std::vector<Halfspace> planes;
  planes.reserve(P.simplices_.size());
  Eigen::MatrixXd E(d - 1, d);
  for (const auto& s : P.simplices_) {
    const Vec& o = P.vertices_[s[0]];
    double longest = 0.0;
    for (int i = 1; i < d; ++i) {
      const Vec e = P.vertices_[s[i]] - o;
      E.row(i - 1) = e.transpose();
      longest = std::max(longest, e.norm());
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[d - 2] <= 1e-9 * longest) continue;
    Vec nrm = svd.matrixV().col(d - 1);
    if (nrm.dot(c - o) > 0.0) nrm = -nrm;
    planes.push_back({nrm, nrm.dot(o)});
  }
  std::sort(planes.begin(), planes.end(),
            [](const Halfspace& a, const Halfspace& b) {
              for (int i = 0; i < a.normal.size(); ++i)
                if (a.normal[i] != b.normal[i]) return a.normal[i] < b.normal[i];
              return a.offset < b.offset;
            });
  for (const auto& h : planes) {
    if (!P.facets_.empty()) {
      Halfspace& last = P.facets_.back();
      if ((last.normal - h.normal).norm() < tol::kFacetMerge) {
        last.offset = std::max(last.offset, h.offset);
        continue;
      }
    }
    P.facets_.push_back(h);
  }
  return P;
}

}  // namespace memvol
