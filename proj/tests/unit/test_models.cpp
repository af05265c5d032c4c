#include "iqa/error.hpp"
#include "iqa/models.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

using namespace iqa;

namespace {

SkInstance single_bond() { return SkInstance(2, {1.0}, {0.0, 0.0}); }

std::vector<std::vector<double>> coupling_matrix(const SkInstance& sk) {
  const int n = sk.n_spins();
  std::vector<std::vector<double>> J(n, std::vector<double>(n, 0.0));
  for (int j = 1; j <= n; ++j)
    for (int k = j + 1; k <= n; ++k)
      J[j - 1][k - 1] = sk.coupling(j, k);
  return J;
}

} // namespace

TEST(Energy, PSpinExamples) {
  EXPECT_DOUBLE_EQ(classical_energy(PSpinModel{3, 3}, {0b111, 3}), -3.0);
  EXPECT_DOUBLE_EQ(classical_energy(PSpinModel{2, 3}, {0b01, 2}), 0.0);
  EXPECT_DOUBLE_EQ(classical_energy(PSpinModel{3, 3}, {0b000, 3}), 3.0);
}

TEST(Energy, SkSingleBond) {
  EXPECT_DOUBLE_EQ(classical_energy(single_bond(), {0b11, 2}), -1.0);
  EXPECT_DOUBLE_EQ(classical_energy(single_bond(), {0b01, 2}), 1.0);
}

TEST(Energy, LengthMismatch) {
  EXPECT_THROW(classical_energy(PSpinModel{3, 3}, {0, 2}), DomainError);
  EXPECT_THROW(classical_energy(single_bond(), {0, 3}), DomainError);
}

TEST(Deterministic, Fig4Values) {
  const auto sk = make_deterministic_sk(DeterministicKind::Fig4, 4);
  EXPECT_NEAR(sk.local_field(1), 0.540302, 1e-6);
  EXPECT_DOUBLE_EQ(sk.local_field(3), std::cos(9.0));
  EXPECT_DOUBLE_EQ(sk.coupling(1, 2), std::cos(1.0) + std::cos(16.0));
  EXPECT_DOUBLE_EQ(sk.coupling(2, 4), std::cos(16.0) + std::cos(256.0));
  EXPECT_DOUBLE_EQ(sk.coupling(4, 2), sk.coupling(2, 4));
}

TEST(Deterministic, Fig5Values) {
  const auto sk = make_deterministic_sk(DeterministicKind::Fig5, 8);
  EXPECT_NEAR(sk.local_field(2), -0.416147, 1e-6);
  EXPECT_DOUBLE_EQ(sk.coupling(2, 3), std::cos(32.0 + 243.0) / 2.0);
  EXPECT_DOUBLE_EQ(sk.coupling(7, 8), std::cos(16807.0 + 32768.0) / 2.0);
  EXPECT_EQ(sk.couplings().size(), 28u);
}

TEST(Deterministic, WrongSize) {
  EXPECT_THROW(make_deterministic_sk(DeterministicKind::Fig4, 5), DomainError);
  EXPECT_THROW(make_deterministic_sk(DeterministicKind::Fig5, 4), DomainError);
}

TEST(Random, Reproducible) {
  EXPECT_EQ(sample_sk(4, 1), sample_sk(4, 1));
  EXPECT_NE(sample_sk(4, 1).couplings(), sample_sk(4, 2).couplings());
  EXPECT_THROW(sample_sk(1, 1), DomainError);
}

TEST(Random, SampleVariance) {
  const auto sk = sample_sk(100, 2024);
  const auto& J = sk.couplings();
  ASSERT_EQ(J.size(), 4950u);
  const double mean = std::accumulate(J.begin(), J.end(), 0.0) / J.size();
  double var = 0.0;
  for (double v : J)
    var += (v - mean) * (v - mean);
  var /= J.size() - 1;
  EXPECT_NEAR(var, 0.01, 0.002);
  EXPECT_NEAR(mean, 0.0, 0.01);
}

TEST(Diagonal, MatchesDirectEnumeration) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto sk = sample_sk(7, seed);
    const auto J = coupling_matrix(sk);
    const auto energies = diagonal_energies(sk);
    for (int c = 0; c < 128; ++c)
      EXPECT_NEAR(energies[c], oracle::sk_energy(7, J, sk.local_fields(), c), 1e-12);
  }
  const auto e = diagonal_energies(PSpinModel{5, 3});
  for (int c = 0; c < 32; ++c) {
    const double m = (2.0 * std::popcount(static_cast<unsigned>(c)) - 5.0) / 5.0;
    EXPECT_NEAR(e[c], -5.0 * m * m * m, 1e-12);
  }
}

TEST(Extremes, Examples) {
  const auto p = diagonal_extremes(PSpinModel{3, 3});
  EXPECT_DOUBLE_EQ(p.e_min, -3.0);
  EXPECT_EQ(p.argmin_config, 0b111u);
  const auto b = diagonal_extremes(single_bond());
  EXPECT_DOUBLE_EQ(b.e_min, -1.0);
  EXPECT_DOUBLE_EQ(b.e_max, 1.0);
  EXPECT_THROW(diagonal_extremes(PSpinModel{25, 3}), CapacityError);
}

TEST(Extremes, WitnessAndOrder) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SkInstance sk = sample_sk(6, seed);
    const auto ext = diagonal_extremes(sk);
    EXPECT_LE(ext.e_min, ext.e_max);
    EXPECT_DOUBLE_EQ(classical_energy(sk, {ext.argmin_config, 6}), ext.e_min);
  }
}

TEST(Property, PSpinPermutationInvariant) {
  const PSpinModel m{6, 3};
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const BasisIndex c = rng() & 63u;
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    BasisIndex d = 0;
    for (int j = 0; j < 6; ++j)
      if ((c >> j) & 1u)
        d |= BasisIndex{1} << perm[j];
    EXPECT_DOUBLE_EQ(classical_energy(m, {c, 6}), classical_energy(m, {d, 6}));
  }
}

TEST(Property, ZeroFieldFlipSymmetry) {
  const auto base = sample_sk(6, 11);
  const SkInstance sk(6, base.couplings(), std::vector<double>(6, 0.0));
  const auto e = diagonal_energies(sk);
  for (BasisIndex c = 0; c < 64; ++c)
    EXPECT_NEAR(e[c], e[c ^ 63u], 1e-12);
  const auto ext = diagonal_extremes(sk);
  EXPECT_NEAR(e[ext.argmin_config ^ 63u], ext.e_min, 1e-12);
  EXPECT_EQ(std::count_if(e.begin(), e.end(), [&](double v) { return std::abs(v - ext.e_min) < 1e-12; }) % 2, 0);
}

TEST(Property, PSpinEnergyPerSpinBounded) {
  for (int n : {1, 4, 9})
    for (int p : {1, 3, 5}) {
      const auto e = diagonal_energies(PSpinModel{n, p});
      for (double v : e) {
        EXPECT_LE(v / n, 1.0 + 1e-15);
        EXPECT_GE(v / n, -1.0 - 1e-15);
      }
    }
}

TEST(Json, RoundTrip) {
  const auto sk = sample_sk(5, 99);
  const auto back = sk_from_json(to_json(sk));
  EXPECT_EQ(back, sk);
  const auto fig5 = make_deterministic_sk(DeterministicKind::Fig5, 8);
  EXPECT_EQ(sk_from_json(to_json(fig5)), fig5);
  EXPECT_EQ(sk_from_json(R"({"n": 4, "kind": "fig4"})"),
            make_deterministic_sk(DeterministicKind::Fig4, 4));
}

TEST(Json, Malformed) {
  EXPECT_THROW(sk_from_json("{"), Error);
  EXPECT_THROW(sk_from_json(R"({"n": 3, "J": [[1,2,0.5]], "h": [0,0]})"), Error);
  EXPECT_THROW(sk_from_json(R"({"n": 3, "J": [[1,4,0.5]], "h": [0,0,0]})"), Error);
  EXPECT_THROW(sk_from_json(R"({"n": 3, "J": [[1,2,0.5],[2,1,0.1]], "h": [0,0,0]})"), Error);
}
