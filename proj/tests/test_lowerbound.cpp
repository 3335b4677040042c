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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "memvol/lowerbound.hpp"
#include "memvol/qae.hpp"

using namespace memvol;

namespace {

constexpr double kPi = std::numbers::pi;

Vec random_ball_point(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Vec x(d);
  for (int i = 0; i < d; ++i) x[i] = g(rng);
  return x * (std::pow(U(rng), 1.0 / d) / x.norm());
}

// Caps whose slab contains p, by brute force over the whole net.
int caps_hit(const CapBodyInstance& inst, const Vec& p) {
  int c = 0;
  const double th = 1.0 - 0.5 * inst.cap_radius * inst.cap_radius;
  for (const auto& v : inst.net.points) c += v.dot(p) > th;
  return c;
}

double total_cap_volume(const CapBodyInstance& inst) {
  return inst.n() * inst.cap_volume;
}

}  // namespace

// ---------------------------------------------------------------------------
// Instance construction

TEST(HardInstance, TotalCapVolumeBracket) {
  for (int d : {2, 3})
    for (double eps : {1e-2, 3e-3, 1e-3}) {
      const auto inst = make_hard_instance(d, eps, BitsSource::Random, 1);
      const double target = 8 * eps * ball_volume(d);
      EXPECT_GE(total_cap_volume(inst), target) << d << ' ' << eps;
      EXPECT_LE(total_cap_volume(inst), 1.1 * target) << d << ' ' << eps;
      EXPECT_NEAR(inst.cap_radius, inst.delta / 2, 1e-15);
      EXPECT_NEAR(inst.cap_volume, cap_volume(d, inst.cap_radius), 1e-15);
      EXPECT_EQ(inst.n(), inst.net.size());
    }
}

TEST(HardInstance, DeltaScalesAsRootEps) {
  const auto ref = make_hard_instance(2, 1e-2, BitsSource::Zeros);
  const double c = ref.delta / std::sqrt(1e-2);
  const auto inst = make_hard_instance(2, 1e-3, BitsSource::Zeros);
  EXPECT_GE(inst.delta, 0.5 * c * std::sqrt(1e-3));
  EXPECT_LE(inst.delta, 2.0 * c * std::sqrt(1e-3));
}

TEST(HardInstance, NetSizeSlope) {
  std::vector<double> lx, ly;
  for (double eps : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
    lx.push_back(std::log(eps));
    ly.push_back(std::log(static_cast<double>(
        make_hard_instance(2, eps, BitsSource::Zeros).n())));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  EXPECT_NEAR(sxy / sxx, -0.5, 0.1);
}

TEST(HardInstance, TooLargeEpsIsError) {
  EXPECT_THROW(make_hard_instance(2, 0.5, BitsSource::Zeros), EstimatorError);
  EXPECT_THROW(make_hard_instance(2, -1.0, BitsSource::Zeros), ContractViolation);
}

TEST(HardInstance, BitsSources) {
  const auto z = make_hard_instance(2, 1e-3, BitsSource::Zeros);
  EXPECT_EQ(z.weight(), 0u);
  const auto o = make_hard_instance(2, 1e-3, BitsSource::Ones);
  EXPECT_EQ(o.weight(), o.n());
  const auto b = make_hard_instance(2, 1e-3, BitsSource::Balanced, 4);
  EXPECT_EQ(b.weight(), b.n() / 2);
  const auto r1 = make_hard_instance(2, 1e-3, BitsSource::Random, 9);
  const auto r2 = make_hard_instance(2, 1e-3, BitsSource::Random, 9);
  EXPECT_EQ(r1.bits, r2.bits);
  EXPECT_THROW(bits_source_from_string("striped"), ContractViolation);
}

TEST(HardInstance, ManifestRoundTrip) {
  const auto inst = make_hard_instance(3, 3e-3, BitsSource::Random, 5);
  const auto back = CapBodyInstance::from_manifest(inst.manifest());
  EXPECT_EQ(back.bits, inst.bits);
  EXPECT_EQ(back.n(), inst.n());
  EXPECT_NEAR(back.delta, inst.delta, 1e-15);
  EXPECT_NEAR(capbody_volume(back), capbody_volume(inst), 1e-15);
  for (std::size_t j = 0; j < inst.n(); ++j)
    ASSERT_TRUE(back.net.points[j].isApprox(inst.net.points[j], 1e-15));
  const auto m = inst.manifest();
  for (const char* key : {"dim", "delta", "n", "cap_radius", "bits", "base_volume",
                          "cap_volume"})
    EXPECT_TRUE(m.contains(key)) << key;
}

// ---------------------------------------------------------------------------
// Membership

TEST(CapMembership, Examples) {
  const auto inst = make_hard_instance(2, 1e-3, BitsSource::Random, 2);
  QueryLedger L;
  const BitOracle o(inst.bits, L);
  EXPECT_TRUE(capbody_membership(inst, Vec::Zero(2), o));
  EXPECT_EQ(L.snapshot().bit_queries, 0u);

  const double r = inst.cap_radius;
  for (std::size_t j : {std::size_t{0}, inst.n() / 3, inst.n() - 1}) {
    const Vec p = inst.net.points[j] * (1 - r * r / 4);
    ASSERT_GT(p.dot(inst.net.points[j]), 1 - r * r / 2);
    const auto before = L.snapshot().bit_queries;
    EXPECT_EQ(capbody_membership(inst, p, o), inst.bits[j] != 0);
    EXPECT_EQ(L.snapshot().bit_queries - before, 1u);
  }

  const auto before = L.snapshot().bit_queries;
  EXPECT_FALSE(capbody_membership(inst, 2 * unit_vector(2, 0), o));
  EXPECT_EQ(L.snapshot().bit_queries, before);
}

TEST(CapMembership, AgreesWithBruteForceAndChargesAtMostOneBit) {
  for (int d : {2, 3}) {
    const auto inst = make_hard_instance(d, 1e-3, BitsSource::Random, 7);
    QueryLedger L;
    const auto h = make_oracle(BodySpec::cap_body(
                                   std::make_shared<CapBodyInstance>(inst)),
                               L);
    std::mt19937_64 rng(d);
    const double th = 1.0 - 0.5 * inst.cap_radius * inst.cap_radius;
    for (int k = 0; k < 100000; ++k) {
      // Half the probes near the sphere so that caps are actually hit.
      Vec p = random_ball_point(d, rng);
      if (k % 2) p *= (1.0 + 0.02 * (static_cast<double>(k % 7) - 3)) / p.norm();
      int cap = -1;
      for (std::size_t j = 0; j < inst.n(); ++j)
        if (inst.net.points[j].dot(p) > th) cap = static_cast<int>(j);
      const bool truth = p.squaredNorm() <= 1.0 && (cap < 0 || inst.bits[cap]);
      ASSERT_EQ(membership(h, p), truth);
    }
    const auto s = L.snapshot();
    EXPECT_EQ(s.membership_queries, 100000u);
    EXPECT_LE(s.bit_queries, s.membership_queries);
    EXPECT_GT(s.bit_queries, 0u);
  }
}

TEST(CapGeometry, CapsDisjointOverManyProbes) {
  const auto inst = make_hard_instance(3, 1e-3, BitsSource::Zeros);
  std::mt19937_64 rng(12);
  int worst = 0;
  for (int k = 0; k < 1000000; ++k) {
    // Probes on the sphere, where caps are widest.
    const Vec p = random_ball_point(3, rng).normalized();
    const int j = inst.cap_of(p);
    if (j >= 0) ASSERT_GT(inst.net.points[j].dot(p), 1 - 0.5 * inst.cap_radius * inst.cap_radius);
    worst = std::max(worst, caps_hit(inst, p));
  }
  EXPECT_LE(worst, 1);
}

// ---------------------------------------------------------------------------
// Volumes

TEST(CapVolumeIdentities, OnesZerosAndSingleBit) {
  for (int d : {2, 3}) {
    auto inst = make_hard_instance(d, 1e-3, BitsSource::Ones);
    EXPECT_NEAR(capbody_volume(inst), ball_volume(d), 1e-9);
    const double ones = capbody_volume(inst);
    std::fill(inst.bits.begin(), inst.bits.end(), 0);
    EXPECT_NEAR(capbody_volume(inst), inst.base_volume, 1e-15);
    EXPECT_NEAR(ones - capbody_volume(inst), inst.n() * inst.cap_volume, 1e-12);
  }
}

TEST(CapVolumeIdentities, SingleBitMonteCarlo) {
  // Coarse instance so one cap carries measurable volume.
  auto inst = make_cap_instance(2, 0.8, Bits(build_delta_net(2, 0.8, 1.0).size(), 0));
  inst.bits[0] = 1;
  QueryLedger L;
  const BitOracle o(inst.bits, L);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int n = 2000000;
  long hits = 0;
  Vec p(2);
  for (int k = 0; k < n; ++k) {
    p << U(rng), U(rng);
    hits += capbody_membership(inst, p, o);
  }
  const double q = static_cast<double>(hits) / n;
  EXPECT_NEAR(4 * q, inst.base_volume + inst.cap_volume,
              3 * 4 * std::sqrt(q * (1 - q) / n));
}

// ---------------------------------------------------------------------------
// Bitstring algorithms

TEST(BitAlgorithms, RecoverReadsEveryBitOnce) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {std::size_t{8}, std::size_t{1000}}) {
    const Bits x = make_bits(n, BitsSource::Random, n);
    QueryLedger L;
    const BitOracle o(x, L);
    EXPECT_EQ(recover_bitstring_deterministic(o, n), x);
    EXPECT_EQ(L.snapshot().bit_queries, n);
  }
  const Bits z(16, 0);
  QueryLedger L;
  EXPECT_EQ(recover_bitstring_deterministic(BitOracle(z, L), 16), z);
}

TEST(BitAlgorithms, RandomizedHammingAllOnes) {
  const Bits x(100, 1);
  for (int s = 0; s < 20; ++s) {
    QueryLedger L;
    EXPECT_EQ(hamming_weight_randomized(BitOracle(x, L), 100, 25, s), 100);
    EXPECT_LE(L.snapshot().bit_queries, 48u);  // ceil(3 * 16)
  }
}

TEST(BitAlgorithms, RandomizedHammingFullReadBranch) {
  Bits x(1000, 0);
  std::fill(x.begin(), x.begin() + 400, 1);
  std::shuffle(x.begin(), x.end(), std::mt19937_64(4));
  int ok = 0;
  for (int s = 0; s < 1000; ++s) {
    QueryLedger L;
    const long w = hamming_weight_randomized(BitOracle(x, L), 1000, 50, s);
    ok += std::abs(w - 400) <= 50;
    // min(ceil(3 * 400), 1000) = 1000: the full read is exact.
    ASSERT_EQ(L.snapshot().bit_queries, 1000u);
    ASSERT_EQ(w, 400);
  }
  EXPECT_GE(ok, 667);
}

TEST(BitAlgorithms, RandomizedHammingSampledBranch) {
  const std::size_t n = 100000, k = 2500;
  const Bits x = make_bits(n, BitsSource::Random, 8);
  long truth = std::count(x.begin(), x.end(), 1);
  int ok = 0;
  for (int s = 0; s < 300; ++s) {
    QueryLedger L;
    const long w = hamming_weight_randomized(BitOracle(x, L), n, k, s);
    ok += std::abs(w - truth) <= static_cast<long>(k);
    ASSERT_EQ(L.snapshot().bit_queries, 4800u);  // ceil(3 * 40^2)
  }
  EXPECT_GE(ok, 200);
}

TEST(BitAlgorithms, QaeHamming) {
  for (std::size_t w : {std::size_t{0}, std::size_t{1024}}) {
    Bits x(1024, 0);
    std::fill(x.begin(), x.begin() + w, 1);
    for (int s = 0; s < 50; ++s) {
      QueryLedger L;
      EXPECT_EQ(hamming_weight_qae(BitOracle(x, L), 1024, 32, s),
                static_cast<long>(w));
      EXPECT_EQ(L.snapshot().bit_queries, 0u);
    }
  }
  Bits x(1024, 0);
  std::fill(x.begin(), x.begin() + 512, 1);
  int ok = 0;
  QueryLedger L;
  for (int s = 0; s < 10000; ++s)
    ok += std::abs(hamming_weight_qae(BitOracle(x, L), 1024, 32, s) - 512) <= 32;
  EXPECT_GE(ok / 1e4, 8 / (kPi * kPi) - 0.02);
  const int M = static_cast<int>(std::ceil(2 * kPi * 1024 / 32));
  EXPECT_EQ(L.snapshot().model_quantum_queries, 10000u * (2 * M + 1));
  EXPECT_EQ(L.snapshot().simulator_evaluations, 10000u * 1024);
}

TEST(BitAlgorithms, BadParameters) {
  const Bits x(10, 0);
  QueryLedger L;
  EXPECT_THROW(hamming_weight_randomized(BitOracle(x, L), 10, 3, 0), ContractViolation);
  EXPECT_THROW(hamming_weight_qae(BitOracle(x, L), 10, 0, 0), ContractViolation);
}

// ---------------------------------------------------------------------------
// Reduction

TEST(Reduction, ExactAndHalfCapOffsets) {
  const auto inst = make_hard_instance(2, 1e-3, BitsSource::Random, 6);
  const double V = capbody_volume(inst);
  const long w = static_cast<long>(inst.weight());
  EXPECT_EQ(reduction_volume_to_hamming(inst, V), w);
  EXPECT_EQ(reduction_volume_to_hamming(inst, V + 0.499 * inst.cap_volume), w);
  EXPECT_EQ(reduction_volume_to_hamming(inst, V - 0.499 * inst.cap_volume), w);
  EXPECT_EQ(reduction_volume_to_hamming(inst, V + 1.0 * inst.cap_volume), w + 1);
}

TEST(Reduction, ErrorTransfer) {
  // |V~ - V| <= eps Gamma moves w by at most n eps Gamma / Vol(P) <= n / 8.
  const double eps = 1e-3;
  const auto inst = make_hard_instance(2, eps, BitsSource::Balanced, 1);
  const double off = eps * ball_volume(2);
  for (double sgn : {-1.0, 1.0}) {
    const long w = reduction_volume_to_hamming(inst, capbody_volume(inst) + sgn * off);
    EXPECT_LE(std::abs(w - static_cast<long>(inst.weight())) * 8,
              static_cast<long>(inst.n()) + 8);
  }
}
