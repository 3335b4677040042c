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

#include "memvol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace memvol {

double ball_volume(int d) {
  if (d < 1) throw ContractViolation("ball_volume: dimension must be >= 1");
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

// ---------------------------------------------------------------------------
// AffineMap

AffineMap::AffineMap(Mat T, Vec x0) : T_(std::move(T)), x0_(std::move(x0)) {
  if (T_.rows() != T_.cols() || T_.rows() != x0_.size())
    throw ContractViolation("AffineMap: shape mismatch");
  Eigen::PartialPivLU<Mat> lu(T_);
  det_ = lu.determinant();
  if (!(std::abs(det_) > tol::kSingular))
    throw ContractViolation("AffineMap: singular linear part");
  Tinv_ = lu.inverse();
}

AffineMap AffineMap::identity(int d) {
  return AffineMap(Mat::Identity(d, d), Vec::Zero(d));
}

AffineMap AffineMap::scaling(int d, double s) {
  return AffineMap(s * Mat::Identity(d, d), Vec::Zero(d));
}

AffineMap AffineMap::translation(const Vec& t) {
  const int d = static_cast<int>(t.size());
  return AffineMap(Mat::Identity(d, d), t);
}

AffineMap AffineMap::inverse() const {
  return AffineMap(Tinv_, -(Tinv_ * x0_));
}

AffineMap AffineMap::compose(const AffineMap& other) const {
  return AffineMap(T_ * other.T_, x0_ + T_ * other.x0_);
}

nlohmann::json AffineMap::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < T_.rows(); ++i) {
    std::vector<double> r(T_.cols());
    for (int j = 0; j < T_.cols(); ++j) r[j] = T_(i, j);
    rows.push_back(r);
  }
  std::vector<double> x0(x0_.data(), x0_.data() + x0_.size());
  return {{"T", rows}, {"x0", x0}};
}

AffineMap AffineMap::from_json(const nlohmann::json& j) {
  const auto& rows = j.at("T");
  const auto x0v = j.at("x0").get<std::vector<double>>();
  const int d = static_cast<int>(x0v.size());
  if (d < 1 || d > kMaxDim || static_cast<int>(rows.size()) != d)
    throw ContractViolation("AffineMap JSON: bad dimensions");
  Mat T(d, d);
  for (int i = 0; i < d; ++i) {
    const auto r = rows[i].get<std::vector<double>>();
    if (static_cast<int>(r.size()) != d)
      throw ContractViolation("AffineMap JSON: ragged matrix");
    for (int k = 0; k < d; ++k) T(i, k) = r[k];
  }
  Vec x0(d);
  for (int i = 0; i < d; ++i) x0[i] = x0v[i];
  return AffineMap(T, x0);
}

// ---------------------------------------------------------------------------
// Spherical caps

SphericalCap::SphericalCap(Vec v, double r) : center(std::move(v)), radius(r) {
  if (std::abs(center.norm() - 1.0) > tol::kUnitNorm)
    throw ContractViolation("SphericalCap: center must be a unit vector");
  if (!(r > 0.0) || r > std::sqrt(2.0) + 1e-15)
    throw ContractViolation("SphericalCap: radius must lie in (0, sqrt 2]");
}

bool cap_contains(const SphericalCap& cap, const Vec& x) {
  return x.squaredNorm() <= 1.0 && x.dot(cap.center) > cap.threshold();
}

double cap_volume(int d, double r) {
  if (d < 2) throw ContractViolation("cap_volume: d must be >= 2");
  if (!(r > 0.0) || r > std::sqrt(2.0) + 1e-15)
    throw ContractViolation("cap_volume: r must lie in (0, sqrt 2]");
  // With t = 1 - x the cap is int_0^h (t (2 - t))^p dt, p = (d - 1)/2.
  // t = s^2 removes the square-root singularity at the tip (odd d - 1) and
  // keeps full relative precision for thin caps.
  const double h = std::min(0.5 * r * r, 1.0);
  const double p = 0.5 * (d - 1);
  auto f = [p, d](double s) {
    return 2.0 * std::pow(s, d) * std::pow(2.0 - s * s, p);
  };
  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, 0.0, std::sqrt(h), 15, tol::kQuadrature, &err);
  return ball_volume(d - 1) * integral;
}

// ---------------------------------------------------------------------------
// Polytope queries

double polytope_volume(const VPolytope& P) {
  const int d = P.dim();
  const Vec& c = P.interior_point();
  double fact = 1.0;
  for (int k = 2; k <= d; ++k) fact *= k;
  double total = 0.0;
  Mat M(d, d);
  for (const auto& s : P.boundary_simplices()) {
    for (int k = 0; k < d; ++k) M.col(k) = P.vertices()[s[k]] - c;
    total += std::abs(M.determinant());
  }
  return total / fact;
}

bool polytope_contains(const VPolytope& P, const Vec& x, double slack) {
  if (x.size() != P.dim())
    throw ContractViolation("polytope_contains: dimension mismatch");
  const auto& F = P.facets();
  if (P.dim() == 2 && P.angles_.size() == F.size() && F.size() >= 3) {
    const Vec& c = P.interior_;
    const double theta = std::atan2(x[1] - c[1], x[0] - c[0]);
    const auto& ang = P.angles_;
    const std::size_t n = ang.size();
    // Edge k spans angles [ang[k], ang[k+1]) cyclically.
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(ang.begin(), ang.end(), theta) - ang.begin());
    k = (k == 0) ? n - 1 : k - 1;
    if (F[k].normal.dot(x) - F[k].offset > slack) return false;
    // Guard against the wedge landing on a neighbouring edge near a vertex.
    const std::size_t kn = (k + 1) % n, kp = (k + n - 1) % n;
    return F[kn].normal.dot(x) - F[kn].offset <= slack &&
           F[kp].normal.dot(x) - F[kp].offset <= slack;
  }
  for (const auto& h : F)
    if (h.normal.dot(x) - h.offset > slack) return false;
  return true;
}

VPolytope scale_polytope(const VPolytope& P, double lambda) {
  if (!(lambda > 0.0)) throw ContractViolation("scale_polytope: lambda <= 0");
  for (const auto& h : P.facets())
    if (!(h.offset > 0.0))
      throw ContractViolation(
          "scale_polytope: origin is not strictly inside the polytope");
  VPolytope Q = P;
  for (auto& v : Q.vertices_) v *= lambda;
  for (auto& h : Q.facets_) h.offset *= lambda;
  Q.interior_ *= lambda;
  return Q;
}

double support_value(const VPolytope& P, const Vec& u) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : P.vertices()) best = std::max(best, u.dot(v));
  return best;
}

double directional_width(const VPolytope& P, const Vec& u) {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& v : P.vertices()) {
    const double t = u.dot(v);
    hi = std::max(hi, t);
    lo = std::min(lo, t);
  }
  return hi - lo;
}

double distance_to_polytope(const VPolytope& P, const Vec& x) {
  if (polytope_contains(P, x, 0.0)) return 0.0;
  return (project_onto_halfspaces(x, P.facets()) - x).norm();
}

namespace {

double violation(const Halfspace& h, const Vec& y) {
  return h.normal.dot(y) - h.offset;
}

// Hildreth's dual coordinate ascent; slow on nearly parallel constraints but
// always converges. Used only when the active-set loop cycles.
Vec hildreth(const Vec& x, std::span<const Halfspace> hs) {
  std::vector<double> lambda(hs.size(), 0.0);
  Vec y = x;
  for (int sweep = 0; sweep < 20000; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double nn = hs[i].normal.squaredNorm();
      const double step =
          std::max(-lambda[i], violation(hs[i], y) / nn);
      if (step != 0.0) {
        lambda[i] += step;
        y -= step * hs[i].normal;
        change = std::max(change, std::abs(step));
      }
    }
    if (change < 1e-15) break;
  }
  return y;
}

}  // namespace

Vec project_onto_halfspaces(const Vec& x, std::span<const Halfspace> hs) {
  const int d = static_cast<int>(x.size());
  double scale = 1.0 + x.lpNorm<Eigen::Infinity>();
  const double feas = 1e-13 * scale;

  std::vector<int> active;
  Vec y = x;
  for (int iter = 0; iter < 200; ++iter) {
    int worst = -1;
    double worst_v = feas;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double v = violation(hs[i], y);
      if (v > worst_v) {
        worst_v = v;
        worst = static_cast<int>(i);
      }
    }
    if (worst < 0) return y;
    if (std::find(active.begin(), active.end(), worst) != active.end()) break;
    active.push_back(worst);

    // Resolve the equality-constrained projection, dropping constraints with
    // negative multipliers until the active set is dual feasible.
    while (!active.empty()) {
      const int k = static_cast<int>(active.size());
      Eigen::MatrixXd A(k, d);
      Eigen::VectorXd rhs(k);
      for (int a = 0; a < k; ++a) {
        A.row(a) = hs[active[a]].normal.transpose();
        rhs[a] = hs[active[a]].normal.dot(x) - hs[active[a]].offset;
      }
      const Eigen::MatrixXd G = A * A.transpose();
      const Eigen::VectorXd lambda =
          G.completeOrthogonalDecomposition().solve(rhs);
      int neg = -1;
      double most_neg = -1e-14;
      for (int a = 0; a < k; ++a)
        if (lambda[a] < most_neg) {
          most_neg = lambda[a];
          neg = a;
        }
      if (neg < 0) {
        Eigen::VectorXd step = A.transpose() * lambda;
        for (int i = 0; i < d; ++i) y[i] = x[i] - step[i];
        break;
      }
      active.erase(active.begin() + neg);
      if (active.empty()) y = x;
    }
    if (static_cast<int>(active.size()) > d) {
      // Degenerate vertex: more than d active planes. Fall back.
      break;
    }
  }
  return hildreth(x, hs);
}

// ---------------------------------------------------------------------------
// MVEE

int affine_rank(std::span<const Vec> points, int d) {
  if (points.empty()) return -1;
  Vec c = Vec::Zero(d);
  for (const auto& p : points) c += p;
  c /= static_cast<double>(points.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
  for (const auto& p : points) {
    const Vec q = p - c;
    S += q * q.transpose();
  }
  // Eigenvalues of the scatter matrix are squared singular values.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  const auto& ev = es.eigenvalues();
  const double top = ev[d - 1];
  if (top <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < d; ++i)
    if (ev[i] > 1e-20 * top) ++rank;
  return rank;
}

EllipsoidShape mvee(std::span<const Vec> points, double tolerance) {
  if (points.empty()) throw ContractViolation("mvee: no points");
  const int d = static_cast<int>(points[0].size());
  const int rank = affine_rank(points, d);
  if (rank < d)
    throw DegenerateInput("mvee: points have affine rank " +
                              std::to_string(rank) + " < " + std::to_string(d),
                          rank);
  const std::size_t n = points.size();
  Eigen::MatrixXd Q(d + 1, n);
  for (std::size_t i = 0; i < n; ++i) {
    Q.block(0, i, d, 1) = points[i];
    Q(d, i) = 1.0;
  }
  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
  // Todd-Yildirim away steps shift weight off points that sit deep inside
  // the current ellipsoid, which plain Khachiyan does only geometrically.
  const double k = d + 1.0;
  for (int iter = 0; iter < 200000; ++iter) {
    const Eigen::MatrixXd X = Q * u.asDiagonal() * Q.transpose();
    const Eigen::LLT<Eigen::MatrixXd> llt(X);
    const Eigen::MatrixXd Y = llt.solve(Q);
    const Eigen::VectorXd M = (Q.cwiseProduct(Y)).colwise().sum().transpose();
    Eigen::Index j = 0;
    const double Mj = M.maxCoeff(&j);
    Eigen::Index a = -1;
    double Ma = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < M.size(); ++i)
      if (u[i] > 0.0 && M[i] < Ma) Ma = M[a = i];
    const double up = (Mj - k) / k;
    const double down = (k - Ma) / k;
    if (std::max(up, down) <= tolerance) break;
    if (up >= down) {
      const double step = (Mj - k) / (k * (Mj - 1.0));
      u *= (1.0 - step);
      u[j] += step;
    } else {
      const double drop = u[a] / (1.0 - u[a]);
      const double step =
          Ma > 1.0 ? std::min((k - Ma) / (k * (Ma - 1.0)), drop) : drop;
      u *= (1.0 + step);
      u[a] -= step;
      u[a] = std::max(u[a], 0.0);
    }
  }
  Eigen::VectorXd c = Q.topRows(d) * u;
  const Eigen::MatrixXd P = Q.topRows(d);
  const Eigen::MatrixXd S =
      P * u.asDiagonal() * P.transpose() - c * c.transpose();
  Eigen::MatrixXd A = S.inverse() / d;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd r = P.col(i) - c;
    worst = std::max(worst, r.dot(A * r));
  }
  if (worst > 1.0) A /= worst;
  EllipsoidShape e;
  e.center = c;
  e.shape = A;
  return e;
}

AffineMap ellipsoid_to_ball(const EllipsoidShape& e) {
  Eigen::LLT<Mat> llt(e.shape);
  if (llt.info() != Eigen::Success)
    throw ContractViolation("ellipsoid_to_ball: shape is not positive definite");
  const Mat Lt = llt.matrixL().transpose();
  return AffineMap(Lt, -(Lt * e.center));
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json VPolytope::to_json() const {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : vertices_)
    verts.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  return {{"dim", dim_}, {"vertices", verts}};
}

VPolytope VPolytope::from_json(const nlohmann::json& j) {
  const int d = j.at("dim").get<int>();
  if (d < 2 || d > kMaxDim)
    throw ContractViolation("VPolytope JSON: unsupported dimension");
  Points pts;
  for (const auto& row : j.at("vertices")) {
    const auto r = row.get<std::vector<double>>();
    if (static_cast<int>(r.size()) != d)
      throw ContractViolation("VPolytope JSON: vertex of wrong dimension");
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = r[i];
    pts.push_back(v);
  }
  return convex_hull(pts, d);
}

}  // namespace memvol
