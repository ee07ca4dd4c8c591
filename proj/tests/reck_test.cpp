// Copyright 2026 The reckga Authors.
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

#include "reckga/reck.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "reckga/forward_model.hpp"

namespace reckga {
namespace {

TEST(GeneBlock, NearlyTransparent) {
  const Eigen::Matrix2cd g = gene_block({0.999999, 0.0, 0.0});
  EXPECT_LE((g - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1.01e-3);
}

TEST(GeneBlock, BalancedCoupler) {
  const Eigen::Matrix2cd g = gene_block({0.5, 0.0, 0.0});
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(g(0, 0) - Complex(r, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g(0, 1) - Complex(0, r)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g(1, 0) - Complex(0, r)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g(1, 1) - Complex(r, 0)), 0.0, 1e-15);
}

TEST(GeneBlock, MatchesHandExpansion) {
  // Entries of BS(0.3) diag(e^{1.1i}, e^{2.2i}) evaluated outside the library.
  const Eigen::Matrix2cd g = gene_block({0.3, 1.1, 2.2});
  const Complex expected[2][2] = {{{0.24844482770164106, 0.4881343745202768}, {-0.6764366226724029, -0.49237536037819074}},
                                  {{-0.745637573516364, 0.37950574298767725}, {-0.32233533703774564, 0.4428317180337954}}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) EXPECT_LE(std::abs(g(r, c) - expected[r][c]), 1e-14);
  EXPECT_LE(unitarity_defect(g), 1e-12);
}

TEST(GeneBlock, RejectsTransmittivityOutOfRange) {
  EXPECT_THROW(gene_block({1.0, 0.0, 0.0}), DomainError);
  EXPECT_THROW(gene_block({-0.1, 0.0, 0.0}), DomainError);
}

TEST(Schedule, TriangleLayout) {
  for (int m = 2; m <= 8; ++m) {
    const TriangleSchedule s = TriangleSchedule::for_modes(m);
    ASSERT_EQ(s.size(), gene_count(m));
    for (int k = 0; k < s.size(); ++k) {
      EXPECT_GE(s.lower_mode(k), 0);
      EXPECT_LT(s.lower_mode(k) + 1, m);
    }
  }
  EXPECT_EQ(TriangleSchedule::for_modes(3).lower_modes(), (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(TriangleSchedule::for_modes(4).lower_modes(), (std::vector<int>{0, 1, 0, 2, 1, 0}));
  EXPECT_THROW(TriangleSchedule::for_modes(4, 2), DomainError);
}

TEST(DnaToUnitary, SingleBalancedGene) {
  const Dna d(2, {{0.5, 0.0, 0.0}});
  const UnitaryMatrix u = dna_to_unitary(d);
  EXPECT_LE((u.matrix() - ComplexMatrix(gene_block({0.5, 0.0, 0.0}))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DnaToUnitary, TransparentGenesGiveIdentity) {
  const Dna d(3, std::vector<Gene>(3, Gene{0.999999, 0.0, 0.0}));
  EXPECT_LE((dna_to_unitary(d).matrix() - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 3e-3);
}

TEST(DnaToUnitary, MatchesEmbeddingOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + trial % 6;
    const Dna d = random_dna(m, rng);
    EXPECT_LE((dna_to_unitary(d).matrix() - oracle::compose(d)).cwiseAbs().maxCoeff(), 1e-12) << "m=" << m;
  }
}

TEST(DnaToUnitary, LengthMismatch) {
  Rng rng(22);
  EXPECT_THROW(dna_to_unitary(random_dna(3, rng), TriangleSchedule::for_modes(4)), ShapeError);
}

TEST(DnaToUnitary, FuzzUnitary) {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + trial % 7;
    EXPECT_LE(unitarity_defect(dna_to_unitary(random_dna(m, rng)).matrix()), 1e-10);
  }
}

TEST(Dna, Invariants) {
  EXPECT_THROW(Dna(3, std::vector<Gene>(2)), ShapeError);
  EXPECT_THROW(Dna(2, {{1.0, 0.0, 0.0}}), DomainError);
  EXPECT_THROW(Dna(2, {{0.5, 2.0 * std::numbers::pi, 0.0}}), DomainError);
  EXPECT_THROW(Dna(2, {{0.5, 0.0, -0.1}}), DomainError);
  EXPECT_NO_THROW(Dna(2, {{0.0, 0.0, 6.28}}));
}

TEST(RandomDna, GeneCounts) {
  Rng rng(24);
  EXPECT_EQ(random_dna(7, rng).size(), 21);
  EXPECT_EQ(random_dna(2, rng).size(), 1);
  EXPECT_THROW(random_dna(1, rng), DomainError);
  for (int m = 2; m <= 9; ++m) EXPECT_EQ(random_dna(m, rng).size(), m * (m - 1) / 2);
}

TEST(RandomDna, UniformTransmittivity) {
  Rng rng(25);
  const int n = 10000;
  double sum = 0.0, phase = 0.0;
  for (int k = 0; k < n; ++k) {
    const Dna d = random_dna(3, rng);
    sum += d[0].t;
    phase += d[0].alpha;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
  EXPECT_NEAR(phase / n, std::numbers::pi, 0.06);
}

TEST(UnitaryToDna, RoundTrip) {
  Rng rng(26);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 6;
    const UnitaryMatrix u = dna_to_unitary(random_dna(m, rng));
    const Dna back = unitary_to_dna(u);
    EXPECT_GE(align_gauge(dna_to_unitary(back), u).fidelity, 1.0 - 1e-8);
  }
}

TEST(UnitaryToDna, HaarRoundTripAndStructure) {
  Rng rng(27);
  for (int trial = 0; trial < 50; ++trial) {
    const UnitaryMatrix u = haar_random_unitary(7, rng);
    const Dna d = unitary_to_dna(u);
    ASSERT_EQ(d.size(), 21);
    for (const Gene& g : d.genes()) EXPECT_TRUE(is_valid_gene(g));
    EXPECT_GE(align_gauge(dna_to_unitary(d), u).fidelity, 1.0 - 1e-8);
  }
}

TEST(UnitaryToDna, IdentityIsTransparent) {
  for (int m = 2; m <= 6; ++m) {
    const Dna d = unitary_to_dna(UnitaryMatrix::identity(m));
    for (const Gene& g : d.genes()) {
      EXPECT_EQ(g.t, kMaxTransmittivity);
      EXPECT_EQ(g.alpha, 0.0);
      EXPECT_EQ(g.beta, 0.0);
    }
    EXPECT_GE(align_gauge(dna_to_unitary(d), UnitaryMatrix::identity(m)).fidelity, 1.0 - 1e-8);
  }
}

TEST(UnitaryToDna, PermutationHasDegeneratePivots) {
  ComplexMatrix swap = ComplexMatrix::Zero(3, 3);
  swap(0, 2) = swap(1, 1) = swap(2, 0) = 1.0;
  const UnitaryMatrix u(swap);
  EXPECT_GE(align_gauge(dna_to_unitary(unitary_to_dna(u)), u).fidelity, 1.0 - 1e-8);
}

TEST(UnitaryToDna, RejectsNonUnitary) {
  // Constructing a UnitaryMatrix with a loose tolerance lets a slightly
  // non-unitary matrix through; the codec checks at 1e-8.
  ComplexMatrix d = ComplexMatrix::Identity(2, 2);
  d(1, 1) = 1.0 + 1e-6;
  EXPECT_THROW(unitary_to_dna(UnitaryMatrix(d, 1e-3)), DomainError);
}

// Shifting both phases of a gene by the same angle multiplies the block by a
// phase on its two modes. That is an input-side gauge for any gene that no
// later slot touches again, so the data must not move. (Shifting every gene
// at once is not such a gauge once m >= 3.)
TEST(Gauge, PhaseShiftOfInputLayerGenesLeavesDataUnchanged) {
  Rng rng(28);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * std::numbers::pi);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + trial % 6;
    const TriangleSchedule sched = TriangleSchedule::for_modes(m);
    const Dna d = random_dna(m, rng);
    std::vector<Gene> shifted = d.genes();
    const double shift = phi(rng);
    for (int k = 0; k < d.size(); ++k) {
      bool touched_later = false;
      for (int l = k + 1; l < d.size(); ++l)
        if (std::abs(sched.lower_mode(l) - sched.lower_mode(k)) <= 1) touched_later = true;
      if (touched_later) continue;
      Gene& g = shifted[static_cast<std::size_t>(k)];
      g.alpha = wrap_phase(g.alpha + shift);
      g.beta = wrap_phase(g.beta + shift);
    }
    const UnitaryMatrix a = dna_to_unitary(d), b = dna_to_unitary(Dna(m, shifted));
    EXPECT_LE((predict_single(a) - predict_single(b)).cwiseAbs().maxCoeff(), 1e-12);
    const auto va = predict_visibilities(a), vb = predict_visibilities(b);
    for (std::size_t k = 0; k < va.size(); ++k) EXPECT_NEAR(va[k].value, vb[k].value, 1e-9);
  }
}

TEST(Gauge, UniformShiftOfAllGenesIsNotAGaugeForM3) {
  Rng rng(29);
  const Dna d = random_dna(3, rng);
  std::vector<Gene> shifted = d.genes();
  for (Gene& g : shifted) {
    g.alpha = wrap_phase(g.alpha + 0.7);
    g.beta = wrap_phase(g.beta + 0.7);
  }
  const auto va = predict_visibilities(dna_to_unitary(d));
  const auto vb = predict_visibilities(dna_to_unitary(Dna(3, shifted)));
  double worst = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) worst = std::max(worst, std::abs(va[k].value - vb[k].value));
  EXPECT_GT(worst, 1e-3);
}

}  // namespace
}  // namespace reckga
