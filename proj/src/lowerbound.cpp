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

#include "memvol/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "memvol/qae.hpp"

namespace memvol {

std::size_t CapBodyInstance::weight() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

int CapBodyInstance::cap_of(const Vec& p) const {
  const double thr = 1.0 - 0.5 * cap_radius * cap_radius;
  // p.v <= |p| for unit v, so short vectors miss every cap.
  if (p.squaredNorm() <= thr * thr) return -1;
  // A point of cap j is within r of v_j; the index cell is delta = 2r.
  int hit = -1;
  index->for_each_near(p, [&](int id) {
    if (net.points[id].dot(p) > thr) {
      hit = id;
      return false;
    }
    return true;
  });
  return hit;
}

namespace {

std::string bits_to_hex(const Bits& b) {
  static const char* digits = "0123456789abcdef";
  std::vector<int> nib((b.size() + 3) / 4, 0);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b[i]) nib[i / 4] |= 8 >> (i % 4);
  std::string s;
  for (int v : nib) s.push_back(digits[v]);
  return s;
}

Bits hex_to_bits(const std::string& s, std::size_t n) {
  if (s.size() != (n + 3) / 4)
    throw ContractViolation("bits hex has wrong length for n");
  Bits b(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const char c = static_cast<char>(std::tolower(s[i / 4]));
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else throw ContractViolation("bits hex: bad digit");
    b[i] = (v & (8 >> (i % 4))) ? 1 : 0;
  }
  return b;
}

}  // namespace

nlohmann::json CapBodyInstance::manifest() const {
  return {{"dim", dim},
          {"delta", delta},
          {"n", n()},
          {"cap_radius", cap_radius},
          {"bits", bits_to_hex(bits)},
          {"base_volume", base_volume},
          {"cap_volume", cap_volume},
          {"eps_inst", eps_inst}};
}

CapBodyInstance CapBodyInstance::from_manifest(const nlohmann::json& j) {
  const int d = j.at("dim").get<int>();
  const double delta = j.at("delta").get<double>();
  const std::size_t n = j.at("n").get<std::size_t>();
  CapBodyInstance inst =
      make_cap_instance(d, delta, hex_to_bits(j.at("bits").get<std::string>(), n));
  inst.eps_inst = j.value("eps_inst", 0.0);
  return inst;
}

BitsSource bits_source_from_string(const std::string& s) {
  if (s == "random") return BitsSource::Random;
  if (s == "balanced") return BitsSource::Balanced;
  if (s == "zeros") return BitsSource::Zeros;
  if (s == "ones") return BitsSource::Ones;
  if (s == "explicit") return BitsSource::Explicit;
  throw ContractViolation("unknown bits source '" + s + "'");
}

Bits make_bits(std::size_t n, BitsSource src, std::uint64_t seed,
               const Bits* explicit_bits) {
  Bits b(n, 0);
  std::mt19937_64 rng(seed);
  switch (src) {
    case BitsSource::Explicit:
      if (!explicit_bits || explicit_bits->size() != n)
        throw ContractViolation("explicit bitstring must have length n = " +
                                std::to_string(n));
      return *explicit_bits;
    case BitsSource::Random:
      for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
      return b;
    case BitsSource::Balanced:
      std::fill(b.begin(), b.begin() + n / 2, 1);
      std::shuffle(b.begin(), b.end(), rng);
      return b;
    case BitsSource::Zeros: return b;
    case BitsSource::Ones: std::fill(b.begin(), b.end(), 1); return b;
  }
  return b;
}

CapBodyInstance make_cap_instance(int d, double delta, Bits bits) {
  CapBodyInstance inst;
  inst.dim = d;
  inst.delta = delta;
  inst.cap_radius = 0.5 * delta;
  inst.net = build_delta_net(d, delta, 1.0);
  if (bits.size() != inst.net.size())
    throw ContractViolation("bitstring length " + std::to_string(bits.size()) +
                            " does not match net size " +
                            std::to_string(inst.net.size()));
  inst.bits = std::move(bits);
  inst.cap_volume = memvol::cap_volume(d, inst.cap_radius);
  inst.base_volume =
      ball_volume(d) - static_cast<double>(inst.n()) * inst.cap_volume;
  inst.index = std::make_shared<const PointGrid>(inst.net.points, delta);
  return inst;
}

CapBodyInstance make_hard_instance(int d, double eps, BitsSource src,
                                   std::uint64_t seed,
                                   const Bits* explicit_bits) {
  if (!(eps > 0.0)) throw ContractViolation("make_hard_instance: eps <= 0");
  const double target = 8.0 * eps * ball_volume(d);
  auto total = [&](double delta) {
    const Net net = build_delta_net(d, delta, 1.0);
    return static_cast<double>(net.size()) * cap_volume(d, 0.5 * delta);
  };
  double hi = 2.0;
  if (total(hi) < target)
    throw EstimatorError("make_hard_instance: eps too large, no delta gives "
                         "total cap volume >= 8 eps Gamma_d");
  double lo = hi;
  while (total(lo) >= target) {
    hi = lo;
    lo *= 0.5;
  }
  while ((hi - lo) > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (total(mid) >= target) hi = mid;
    else lo = mid;
  }
  const Net net = build_delta_net(d, hi, 1.0);
  CapBodyInstance inst =
      make_cap_instance(d, hi, make_bits(net.size(), src, seed, explicit_bits));
  inst.eps_inst = eps;
  return inst;
}

bool capbody_membership(const CapBodyInstance& inst, const Vec& p,
                        const BitOracle& o) {
  if (p.size() != inst.dim)
    throw ContractViolation("capbody_membership: dimension mismatch");
  if (p.squaredNorm() > 1.0) return false;
  const int j = inst.cap_of(p);
  if (j < 0) return true;
  return o.read(static_cast<std::size_t>(j));
}

double capbody_volume(const CapBodyInstance& inst) {
  return inst.base_volume +
         static_cast<double>(inst.weight()) * inst.cap_volume;
}

Bits recover_bitstring_deterministic(const BitOracle& o, std::size_t n) {
  Bits out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = o.read(j) ? 1 : 0;
  return out;
}

long hamming_weight_randomized(const BitOracle& o, std::size_t n, std::size_t k,
                               std::uint64_t seed) {
  if (k < 1 || 4 * k > n)
    throw ContractViolation("hamming_weight_randomized: need 1 <= k <= n/4");
  const double ratio = static_cast<double>(n) / static_cast<double>(k);
  const std::size_t want = static_cast<std::size_t>(std::ceil(3.0 * ratio * ratio));
  if (want >= n) {
    long w = 0;
    for (std::size_t j = 0; j < n; ++j) w += o.read(j) ? 1 : 0;
    return w;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t ones = 0;
  for (std::size_t s = 0; s < want; ++s) ones += o.read(pick(rng)) ? 1 : 0;
  return std::lround(static_cast<double>(n) * ones / static_cast<double>(want));
}

long hamming_weight_qae(const BitOracle& o, std::size_t n, std::size_t k,
                        std::uint64_t seed) {
  if (k < 1 || 4 * k > n)
    throw ContractViolation("hamming_weight_qae: need 1 <= k <= n/4");
  const Bits& x = o.raw();
  o.ledger().charge_simulator(n);
  const double a = static_cast<double>(std::count(x.begin(), x.begin() + n, 1)) /
                   static_cast<double>(n);
  int M = static_cast<int>(std::ceil(2.0 * std::numbers::pi * n / k));
  M += M % 2;
  o.ledger().charge_model_quantum(2 * static_cast<std::uint64_t>(M) + 1);
  std::mt19937_64 rng(seed);
  return std::lround(static_cast<double>(n) * qae_sample(a, M, rng));
}

long reduction_volume_to_hamming(const CapBodyInstance& inst, double V) {
  return std::lround((V - inst.base_volume) / inst.cap_volume);
}

}  // namespace memvol
