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

#include "memvol/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "memvol/lowerbound.hpp"

namespace memvol {

namespace {

void check_dim(int d) {
  if (d < 2 || d > kMaxDim)
    throw ContractViolation("body dimension must be in [2, 6], got " +
                            std::to_string(d));
}

// Vertices of {x : a_i.x <= b_i}, b_i > 0, by polarity: each facet
// {y : f.y <= c} of hull{a_i / b_i} is the vertex f / c.
Points enumerate_vertices(int d, const std::vector<Halfspace>& hs) {
  Points dual;
  for (const auto& h : hs) dual.push_back(h.normal / h.offset);
  const VPolytope D = convex_hull(dual, d);
  Points out;
  for (const auto& f : D.facets()) {
    const Vec x = f.normal / f.offset;
    bool dup = false;
    for (const auto& v : out)
      if ((v - x).norm() < 1e-9 * std::max(1.0, x.norm())) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(x);
  }
  return out;
}

Vec vec_from_json(const nlohmann::json& j) {
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

nlohmann::json vec_to_json(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string to_string(BodyKind k) {
  switch (k) {
    case BodyKind::Ball: return "ball";
    case BodyKind::Ellipsoid: return "ellipsoid";
    case BodyKind::Box: return "box";
    case BodyKind::HPolytope: return "hpolytope";
    case BodyKind::CapBody: return "capbody";
  }
  return "unknown";
}

BodySpec BodySpec::ball(int d, double radius) {
  check_dim(d);
  if (!(radius >= 1.0)) throw ContractViolation("ball: radius must be >= 1");
  BodySpec s;
  s.kind = BodyKind::Ball;
  s.dim = d;
  s.radius = radius;
  s.outer_radius = radius;
  return s;
}

BodySpec BodySpec::ellipsoid(const Mat& A) {
  const int d = static_cast<int>(A.rows());
  check_dim(d);
  if (A.cols() != d || !A.isApprox(A.transpose(), 1e-12))
    throw ContractViolation("ellipsoid: shape must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  const auto& ev = es.eigenvalues();
  if (!(ev[0] > 0.0)) throw ContractViolation("ellipsoid: shape not PD");
  if (ev[d - 1] > 1.0 + 1e-12)
    throw ContractViolation("ellipsoid: eigenvalues must be <= 1");
  BodySpec s;
  s.kind = BodyKind::Ellipsoid;
  s.dim = d;
  s.shape = A;
  s.outer_radius = 1.0 / std::sqrt(ev[0]);
  return s;
}

BodySpec BodySpec::ellipsoid_axes(const Vec& semi_axes) {
  Vec inv(semi_axes.size());
  for (int i = 0; i < semi_axes.size(); ++i)
    inv[i] = 1.0 / (semi_axes[i] * semi_axes[i]);
  return ellipsoid(Mat(inv.asDiagonal()));
}

BodySpec BodySpec::box(const Vec& h) {
  const int d = static_cast<int>(h.size());
  check_dim(d);
  for (int i = 0; i < d; ++i)
    if (!(h[i] >= 1.0)) throw ContractViolation("box: halfwidths must be >= 1");
  BodySpec s;
  s.kind = BodyKind::Box;
  s.dim = d;
  s.halfwidths = h;
  s.outer_radius = h.norm();
  return s;
}

BodySpec BodySpec::hpolytope(int d, std::vector<Halfspace> hs) {
  check_dim(d);
  if (static_cast<int>(hs.size()) < d + 1)
    throw ContractViolation("hpolytope: need at least d+1 halfspaces");
  Points normals;
  for (auto& h : hs) {
    if (h.normal.size() != d)
      throw ContractViolation("hpolytope: normal dimension mismatch");
    if (std::abs(h.normal.norm() - 1.0) > 1e-9)
      throw ContractViolation("hpolytope: normals must be unit vectors");
    if (!(h.offset >= 1.0))
      throw ContractViolation("hpolytope: offsets must be >= 1");
    normals.push_back(h.normal);
  }
  // Bounded iff the normals positively span R^d, i.e. the origin is interior
  // to their hull.
  bool bounded = false;
  try {
    const VPolytope N = convex_hull(normals, d);
    bounded = std::all_of(N.facets().begin(), N.facets().end(),
                          [](const Halfspace& f) { return f.offset > 1e-12; });
  } catch (const DegenerateInput&) {
    bounded = false;
  }
  if (!bounded) throw ContractViolation("hpolytope: body is unbounded");
  BodySpec s;
  s.kind = BodyKind::HPolytope;
  s.dim = d;
  s.halfspaces = std::move(hs);
  s.hvertices = enumerate_vertices(d, s.halfspaces);
  double R = 0.0;
  for (const auto& v : s.hvertices) R = std::max(R, v.norm());
  s.outer_radius = R;
  return s;
}

BodySpec BodySpec::cap_body(std::shared_ptr<const CapBodyInstance> inst) {
  BodySpec s;
  s.kind = BodyKind::CapBody;
  s.dim = inst->dim;
  s.outer_radius = 1.0;
  s.inner_radius = 1.0 - 0.5 * inst->cap_radius * inst->cap_radius;
  s.capbody = std::move(inst);
  return s;
}

BodySpec BodySpec::builtin(const std::string& name, int d) {
  check_dim(d);
  if (name == "ball") return ball(d, 1.0);
  if (name == "cube" || name == "box") return box(Vec::Ones(d));
  if (name == "box12") {
    Vec h = Vec::Ones(d);
    h[1] = 2.0;
    return box(h);
  }
  if (name == "ellipsoid") {
    Vec a = Vec::Ones(d);
    a[1] = 5.0;
    return ellipsoid_axes(a);
  }
  if (name == "crosspolytope") {
    // Facet normals (+-1, ..., +-1)/sqrt(d) at offset 1 give an
    // l1-ball of radius sqrt(d), which contains B_d.
    std::vector<Halfspace> hs;
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vec n(d);
      for (int i = 0; i < d; ++i) n[i] = (mask >> i & 1) ? 1.0 : -1.0;
      hs.push_back({n / std::sqrt(static_cast<double>(d)), 1.0});
    }
    return hpolytope(d, std::move(hs));
  }
  throw ContractViolation("unknown builtin body '" + name + "'");
}

nlohmann::json BodySpec::to_json() const {
  nlohmann::json j{{"kind", to_string(kind)}, {"dim", dim}};
  switch (kind) {
    case BodyKind::Ball: j["radius"] = radius; break;
    case BodyKind::Ellipsoid: {
      nlohmann::json rows = nlohmann::json::array();
      for (int r = 0; r < shape.rows(); ++r) rows.push_back(vec_to_json(shape.row(r).transpose()));
      j["shape"] = rows;
      break;
    }
    case BodyKind::Box: j["halfwidths"] = vec_to_json(halfwidths); break;
    case BodyKind::HPolytope: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& h : halfspaces)
        arr.push_back({{"normal", vec_to_json(h.normal)}, {"offset", h.offset}});
      j["halfspaces"] = arr;
      break;
    }
    case BodyKind::CapBody: j["instance"] = capbody->manifest(); break;
  }
  return j;
}

BodySpec BodySpec::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const int d = j.at("dim").get<int>();
    if (kind == "ball") return ball(d, j.value("radius", 1.0));
    if (kind == "ellipsoid") {
      if (j.contains("semi_axes")) {
        const Vec a = vec_from_json(j["semi_axes"]);
        if (a.size() != d) throw ContractViolation("ellipsoid: dim mismatch");
        return ellipsoid_axes(a);
      }
      const auto& rows = j.at("shape");
      if (static_cast<int>(rows.size()) != d)
        throw ContractViolation("ellipsoid: dim mismatch");
      Mat A(d, d);
      for (int r = 0; r < d; ++r) {
        const Vec row = vec_from_json(rows[r]);
        if (row.size() != d) throw ContractViolation("ellipsoid: dim mismatch");
        A.row(r) = row.transpose();
      }
      return ellipsoid(A);
    }
    if (kind == "box") {
      const Vec h = vec_from_json(j.at("halfwidths"));
      if (h.size() != d) throw ContractViolation("box: dim mismatch");
      return box(h);
    }
    if (kind == "hpolytope") {
      std::vector<Halfspace> hs;
      for (const auto& e : j.at("halfspaces"))
        hs.push_back({vec_from_json(e.at("normal")), e.at("offset").get<double>()});
      return hpolytope(d, std::move(hs));
    }
    if (kind == "capbody") {
      auto inst = std::make_shared<CapBodyInstance>(
          CapBodyInstance::from_manifest(j.at("instance")));
      if (inst->dim != d) throw ContractViolation("capbody: dim mismatch");
      return cap_body(std::move(inst));
    }
    throw ContractViolation("unknown body kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("body json: ") + e.what());
  }
}

OracleHandle make_oracle(const BodySpec& spec, QueryLedger& ledger) {
  return OracleHandle(std::make_shared<const BodySpec>(spec), &ledger);
}

bool spec_contains(const BodySpec& s, const Vec& x) {
  switch (s.kind) {
    case BodyKind::Ball: return x.squaredNorm() <= s.radius * s.radius;
    case BodyKind::Ellipsoid: return x.dot(s.shape * x) <= 1.0;
    case BodyKind::Box:
      for (int i = 0; i < s.dim; ++i)
        if (std::abs(x[i]) > s.halfwidths[i]) return false;
      return true;
    case BodyKind::HPolytope:
      for (const auto& h : s.halfspaces)
        if (h.normal.dot(x) > h.offset) return false;
      return true;
    case BodyKind::CapBody: {
      const CapBodyInstance& inst = *s.capbody;
      if (x.squaredNorm() > 1.0) return false;
      const int j = inst.cap_of(x);
      return j < 0 || inst.bits[j] != 0;
    }
  }
  return false;
}

bool membership(const OracleHandle& h, const Vec& x) {
  if (x.size() != h.dim())
    throw ContractViolation("membership: dimension mismatch");
  const Vec y = h.pre_map ? h.pre_map->apply_inverse(x) : x;
  if (h.ledger) h.ledger->charge_membership();
  if (h.spec->kind == BodyKind::CapBody) {
    QueryLedger scratch;
    const BitOracle bits(h.spec->capbody->bits, h.ledger ? *h.ledger : scratch);
    return capbody_membership(*h.spec->capbody, y, bits);
  }
  return spec_contains(*h.spec, y);
}

bool simulated_membership(const OracleHandle& h, const Vec& x) {
  if (x.size() != h.dim())
    throw ContractViolation("simulated_membership: dimension mismatch");
  const Vec y = h.pre_map ? h.pre_map->apply_inverse(x) : x;
  if (h.ledger) h.ledger->charge_simulator();
  return spec_contains(*h.spec, y);
}

OracleHandle transformed_oracle(const OracleHandle& h, const AffineMap& L) {
  if (L.dim() != h.dim())
    throw ContractViolation("transformed_oracle: dimension mismatch");
  if (!(std::abs(L.det()) > tol::kSingular))
    throw ContractViolation("transformed_oracle: singular map");
  OracleHandle out = h;
  out.pre_map = h.pre_map ? L.compose(*h.pre_map) : L;
  return out;
}

double analytic_volume(const BodySpec& s) {
  const double G = ball_volume(s.dim);
  switch (s.kind) {
    case BodyKind::Ball: return G * std::pow(s.radius, s.dim);
    case BodyKind::Ellipsoid: return G / std::sqrt(s.shape.determinant());
    case BodyKind::Box: return std::pow(2.0, s.dim) * s.halfwidths.prod();
    case BodyKind::HPolytope:
      return polytope_volume(convex_hull(s.hvertices, s.dim));
    case BodyKind::CapBody: return capbody_volume(*s.capbody);
  }
  return 0.0;
}

double analytic_support(const BodySpec& s, const Vec& u) {
  if (u.size() != s.dim)
    throw ContractViolation("analytic_support: dimension mismatch");
  if (std::abs(u.norm() - 1.0) > tol::kUnitNorm)
    throw ContractViolation("analytic_support: direction must be a unit vector");
  switch (s.kind) {
    case BodyKind::Ball: return s.radius;
    case BodyKind::Ellipsoid:
      return std::sqrt(u.dot(s.shape.ldlt().solve(u)));
    case BodyKind::Box: return u.cwiseAbs().dot(s.halfwidths);
    case BodyKind::HPolytope: {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& v : s.hvertices) best = std::max(best, u.dot(v));
      return best;
    }
    case BodyKind::CapBody:
      throw UnsupportedOperation("analytic_support: not offered for cap bodies");
  }
  return 0.0;
}

}  // namespace memvol
