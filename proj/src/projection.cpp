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

// Projection onto a body known only through membership. Boundary points come
// from radial bisection. Probes around the current boundary point give a
// relaxed supporting cut and a local quadratic model of the surface. Steps
// are safeguarded Newton steps on the distance to x, plus the projection
// onto the collected cuts, which is what finds kinks.

#include "memvol/projection.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <span>

namespace memvol {

namespace {

class Prober {
 public:
  Prober(const OracleHandle& h, double R) : h_(h), R_(R) {}

  bool inside(const Vec& y) {
    ++queries;
    return membership(h_, y);
  }

  // Largest t found with t u inside, t in [rho(u) - tol, rho(u)]. The unit
  // ball is inside and rho <= hi_known. With a guess, brackets by galloping
  // out from guess +- w before bisecting.
  double radial(const Vec& u, double tol, double guess = -1.0, double w = 0.0,
                double hi_known = -1.0, bool unit_known_inside = false) {
    double lo = 1.0;
    double hi = hi_known > 0.0 ? std::min(hi_known, R_) : R_;
    if (guess > 0.0 && hi > lo) {
      w = std::max(w, tol);
      for (double s = w;; s *= 2.0) {
        const double a = guess - s;
        if (a <= lo) break;
        if (inside(a * u)) {
          lo = a;
          break;
        }
        hi = std::min(hi, a);
      }
      for (double s = w;; s *= 2.0) {
        const double b = std::max(guess, lo) + s;
        if (b >= hi) break;
        if (!inside(b * u)) {
          hi = b;
          break;
        }
        lo = b;
      }
    }
    bool verified = lo > 1.0 || unit_known_inside;
    while (hi - lo > tol) {
      const double m = 0.5 * (lo + hi);
      if (inside(m * u)) {
        lo = m;
        verified = true;
      } else {
        hi = m;
      }
    }
    // t = 1 is inside only in exact arithmetic; confirm it.
    for (int k = 0; !verified && k < 64; ++k) {
      if (inside(lo * u)) verified = true;
      else lo -= tol * std::ldexp(1.0, k);
    }
    if (!verified) throw EstimatorError("radial: no member found along ray");
    return lo;
  }

  std::uint64_t queries = 0;

 private:
  const OracleHandle& h_;
  double R_;
};

// Orthonormal basis of the complement of unit u, as columns.
Mat tangent_basis(const Vec& u) {
  const int d = static_cast<int>(u.size());
  Mat A = Mat::Identity(d, d);
  A.col(0) = u;
  Eigen::HouseholderQR<Mat> qr(A);
  const Mat Q = qr.householderQ();
  return Q.rightCols(d - 1);
}

}  // namespace

Vec radial_boundary_point(const OracleHandle& h, const Vec& u, double tol,
                          double R) {
  if (u.size() != h.dim())
    throw ContractViolation("radial_boundary_point: dimension mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-9)
    throw ContractViolation("radial_boundary_point: direction must be unit");
  if (!(tol > 0.0) || !(R >= 1.0))
    throw ContractViolation("radial_boundary_point: need tol > 0 and R >= 1");
  Prober P(h, R);
  if (!P.inside(u)) {
    // Round-off on a body whose boundary touches the unit sphere.
    const double t = 1.0 - tol::kUnitNorm;
    if (tol >= tol::kUnitNorm && P.inside(t * u)) return t * u;
    throw EstimatorError(
        "radial_boundary_point: u is not in the body, unit ball not inside");
  }
  return P.radial(u, tol, -1.0, 0.0, -1.0, true) * u;
}

double projection_query_constant(int d) { return 16.0 * d; }

namespace {

// Boundary point near direction u with a local quadratic model of the
// surface: heights h(s) = g.s - s^T K s / 2 over the tangent plane at z.
struct LocalModel {
  Vec z;
  Vec n;   // outward normal estimate
  Mat T;   // tangent basis of n, as columns
  Vec g;   // slope correction
  Mat K;   // curvature
  double slack = 0.0;  // largest probe height above the tangent plane
};

LocalModel fit_local(Prober& P, const Vec& u, double rho, double tau,
                     double tol, double R) {
  const int d = static_cast<int>(u.size());
  const int m = d - 1;
  LocalModel M;
  M.z = rho * u;
  const Mat Tu = tangent_basis(u);
  std::vector<Vec> dirs;
  for (int i = 0; i < m; ++i) dirs.push_back(Tu.col(i));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      dirs.push_back((Tu.col(i) + Tu.col(j)) / std::sqrt(2.0));
  Points probes;
  Mat C(m, d);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    Vec pair[2];
    for (int s = 0; s < 2; ++s) {
      Vec v = u + ((s == 0 ? 1.0 : -1.0) * tau / rho) * dirs[k];
      v.normalize();
      pair[s] = P.radial(v, tol, rho, 2.0 * tau * R + tol) * v;
      probes.push_back(pair[s]);
    }
    if (static_cast<int>(k) < m) C.row(k) = (pair[0] - pair[1]).transpose();
  }
  Vec n(d);
  if (d == 2) {
    n << C(0, 1), -C(0, 0);
  } else {
    Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
    n = svd.matrixV().col(d - 1);
  }
  n.normalize();
  if (n.dot(u) < 0.0) n = -n;
  M.n = n;
  M.T = tangent_basis(n);

  // Secant lines through z extended past z leave K, which bounds how far the
  // boundary between a probe pair can rise above the tangent plane.
  for (std::size_t k = 0; k + 1 < probes.size(); k += 2) {
    const Vec wp = probes[k] - M.z, wm = probes[k + 1] - M.z;
    const double hp = n.dot(wp), hm = n.dot(wm);
    const double sp = (wp - hp * n).norm(), sm = (wm - hm * n).norm();
    if (sp > 0.0 && sm > 0.0)
      M.slack = std::max({M.slack, -hm * sp / sm, -hp * sm / sp});
  }
  // Bisection error tilts the chord normal; bound the effect across K.
  double chord = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) chord = std::min(chord, C.row(k).norm());
  M.slack += 4.0 * tol / chord * 2.0 * R;
  const int nk = m * (m + 1) / 2;
  Eigen::MatrixXd A(probes.size(), m + nk);
  Eigen::VectorXd hv(probes.size());
  for (std::size_t r = 0; r < probes.size(); ++r) {
    const Vec q = probes[r] - M.z;
    const Vec sg = M.T.transpose() * q;
    hv[r] = n.dot(q);
    M.slack = std::max(M.slack, hv[r]);
    int c = 0;
    for (int i = 0; i < m; ++i) A(r, c++) = sg[i];
    for (int i = 0; i < m; ++i) A(r, c++) = -0.5 * sg[i] * sg[i];
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) A(r, c++) = -sg[i] * sg[j];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(hv);
  M.g = coef.head(m);
  M.K = Mat::Zero(m, m);
  int c = m;
  for (int i = 0; i < m; ++i) M.K(i, i) = coef[c++];
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) M.K(i, j) = M.K(j, i) = coef[c++];
  return M;
}

// Newton step in tangent coordinates for min |z(s) - x|^2 on the model.
Vec newton_step(const LocalModel& M, const Vec& x) {
  const int m = static_cast<int>(M.g.size());
  const Vec r = x - M.z;
  const double a = M.n.dot(r);
  const Vec b = M.T.transpose() * r;
  Eigen::SelfAdjointEigenSolver<Mat> es(M.K);
  const Mat Kp = es.eigenvectors() *
                 es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                 es.eigenvectors().transpose();
  const Mat H = Mat::Identity(m, m) + M.g * M.g.transpose() +
                std::max(a, 0.0) * Kp;
  const Vec rhs = b + a * M.g;
  return H.ldlt().solve(rhs);
}

// Lower bound on dist(x, {y : n_i.y <= b_i}) from the dual: any lambda >= 0
// gives dist^2 / 2 >= lambda.(N x - b) - |N^T lambda|^2 / 2. Coordinate ascent
// keeps lambda feasible, so the bound is valid however early it stops.
double dual_distance_bound(const Vec& x, std::span<const Halfspace> hs) {
  const std::size_t k = hs.size();
  std::vector<double> lam(k, 0.0);
  Vec w = Vec::Zero(x.size());  // N^T lambda
  double q = 0.0;
  for (int sweep = 0; sweep < 400; ++sweep) {
    for (std::size_t i = 0; i < k; ++i) {
      const Vec& n = hs[i].normal;
      const double c = n.dot(x) - hs[i].offset - n.dot(w);
      const double nl = std::max(0.0, lam[i] + c / n.squaredNorm());
      w += (nl - lam[i]) * n;
      lam[i] = nl;
    }
    double val = -0.5 * w.squaredNorm();
    for (std::size_t i = 0; i < k; ++i)
      val += lam[i] * (hs[i].normal.dot(x) - hs[i].offset);
    if (sweep > 0 && val - q <= 1e-17 * (1.0 + val)) {
      q = std::max(q, val);
      break;
    }
    q = std::max(q, val);
  }
  return std::sqrt(2.0 * q);
}

}  // namespace

Vec approximate_projection(const OracleHandle& h, const Vec& x, double eps,
                           double R, ProjectionStats* stats) {
  const int d = h.dim();
  if (x.size() != d)
    throw ContractViolation("approximate_projection: dimension mismatch");
  if (!(eps > 0.0 && eps < 1.0))
    throw ContractViolation("approximate_projection: eps must lie in (0, 1)");
  if (!x.allFinite())
    throw ContractViolation("approximate_projection: x is not finite");

  Prober P(h, R);
  int it = 0;
  auto finish = [&](const Vec& y) {
    if (stats) {
      stats->iterations = it;
      stats->cuts = it;
      stats->queries = P.queries;
    }
    return y;
  };
  if (P.inside(x)) return finish(x);

  const double xn = x.norm();
  const double floor_tol = 4e-15 * R;
  const double tau_min = 0.25 * eps;
  const int budget = static_cast<int>(
      std::ceil(40.0 * d * std::log(std::max(2.0, R * xn / eps))));

  Vec u = x / xn;
  double tau = std::min(0.1, std::max(tau_min, 0.1 * (xn - 1.0)));
  auto tol_for = [&](double t) {
    const double a = std::max(1.0, xn + R);
    return std::max(floor_tol, t * eps / (32.0 * a));
  };
  double tol = tol_for(tau);
  double rho = P.radial(u, tol, -1.0, 0.0, xn);
  double F = (rho * u - x).norm();
  Vec best = rho * u;

  std::deque<Halfspace> cuts;
  const std::size_t max_cuts = 4 * static_cast<std::size_t>(d);
  for (it = 1; it <= budget; ++it) {
    const LocalModel M = fit_local(P, u, rho, tau, tol, R);
    cuts.push_back({M.n, M.n.dot(M.z) + M.slack + 2.0 * tol});
    if (cuts.size() > max_cuts) cuts.pop_front();
    // Outer certificate: for K inside the cuts, |z - y*|^2 <= F^2 - D^2.
    // The slack bound covers all of K only in the plane, where the probe
    // slice is the whole space.
    const std::vector<Halfspace> hs(cuts.begin(), cuts.end());
    const Vec yc = project_onto_halfspaces(x, hs);
    if (d == 2) {
      const double D = dual_distance_bound(x, hs);
      if (F * F - D * D <= 0.25 * eps * eps) return finish(M.z);
    }
    const Vec s = newton_step(M, x);
    const double sn = s.norm();
    if (sn <= 0.25 * eps && tau <= tau_min * 1.0000001) return finish(M.z);

    // Backtrack on the distance to x along the Newton direction.
    double t = 1.0;
    Vec u_new = u;
    double rho_new = rho, F_new = F;
    bool moved = false;
    const double tol_next = tol_for(std::max(tau_min, std::min(tau, 0.5 * sn)));
    for (int k = 0; k < 12; ++k, t *= 0.5) {
      Vec v = M.z + t * (M.T * s);
      v.normalize();
      const double r = P.radial(v, tol_next, rho, 2.0 * t * sn * R + tol_next);
      const double f = (r * v - x).norm();
      if (f < F) {
        u_new = v;
        rho_new = r;
        F_new = f;
        moved = true;
        break;
      }
    }
    // The projection onto the cuts often lands on a kink the model misses.
    if (yc.norm() > 1.0) {
      Vec v = yc / yc.norm();
      const double r = P.radial(v, tol_next, rho, (yc - M.z).norm() + tol_next);
      const double f = (r * v - x).norm();
      if (f < F_new - 2.0 * tol_next) {
        u_new = v;
        rho_new = r;
        F_new = f;
        moved = true;
      } else if (r * (yc.norm() - r) > tau) {
        // Still well outside K: cut it off, as a plain cutting-plane step.
        const LocalModel C = fit_local(P, v, r, tau, tol, R);
        cuts.push_back({C.n, C.n.dot(C.z) + C.slack + 2.0 * tol});
        if (cuts.size() > max_cuts) cuts.pop_front();
      }
    }
    const double step = moved ? (rho_new * u_new - rho * u).norm() : 0.0;
    if (moved) {
      u = u_new;
      rho = rho_new;
      F = F_new;
      best = rho * u;
    }
    if (moved) {
      tau = std::clamp(std::min(0.5 * step, step * step), tau_min, tau);
      tol = tol_for(tau);
    } else {
      // No descent at this scale: refine the probes and the radius.
      if (tau <= tau_min * 1.0000001) return finish(best);
      tau = std::max(tau_min, 0.25 * tau);
      tol = tol_for(tau);
      rho = P.radial(u, tol, rho, 4.0 * tol);
      F = (rho * u - x).norm();
      best = rho * u;
    }
  }
  if (stats) {
    stats->iterations = budget;
    stats->cuts = budget;
    stats->queries = P.queries;
  }
  throw ProjectionError("approximate_projection: no convergence within " +
                            std::to_string(budget) + " steps",
                        best, F);
}

}  // namespace memvol
