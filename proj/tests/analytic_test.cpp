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

#include "reckga/analytic.hpp"

#include <gtest/gtest.h>

#include "reckga/linalg.hpp"

namespace reckga {
namespace {

MeasurementSet noiseless_data(const UnitaryMatrix& u) {
  Rng rng(0);
  NoiseConfig nc;
  nc.noiseless = true;
  return simulate_measurements(u, nc, rng);
}

TEST(AnalyticReconstruct, IdentityData) {
  for (int m = 2; m <= 5; ++m) {
    const AnalyticReconstruction r = analytic_reconstruct(noiseless_data(UnitaryMatrix::identity(m)), {0, 0});
    EXPECT_LE((r.unitary.matrix() - ComplexMatrix::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-9) << m;
    EXPECT_EQ(r.clamped, 0);
  }
}

TEST(AnalyticReconstruct, NoiselessRoundTripEveryAnchor) {
  Rng rng(70);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 3 + trial % 3;
    const UnitaryMatrix u = haar_random_unitary(m, rng);
    const MeasurementSet data = noiseless_data(u);
    for (int c = 0; c < m; ++c)
      for (int r = 0; r < m; ++r) {
        const AnalyticReconstruction rec = analytic_reconstruct(data, {c, r});
        EXPECT_GE(align_gauge(rec.unitary, u).fidelity, 1.0 - 1e-6) << trial << " anchor " << c << "," << r;
        EXPECT_LE(rec.raw_defect, 1e-6);
      }
  }
}

TEST(AnalyticReconstruct, AnchorGaugeIsRealPositive) {
  Rng rng(71);
  const UnitaryMatrix u = haar_random_unitary(4, rng);
  const Anchor a{1, 2};
  const AnalyticReconstruction rec = analytic_reconstruct(noiseless_data(u), a);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(rec.unitary(k, a.input).imag(), 0.0, 1e-9);
    EXPECT_GE(rec.unitary(k, a.input).real(), -1e-9);
    EXPECT_NEAR(rec.unitary(a.output, k).imag(), 0.0, 1e-9);
    EXPECT_GE(rec.unitary(a.output, k).real(), -1e-9);
  }
}

TEST(AnalyticReconstruct, NoisyDataIsClampedAndProjected) {
  Rng rng(72);
  const UnitaryMatrix u = haar_random_unitary(5, rng);
  NoiseConfig nc;
  nc.shots = 200;
  nc.sigma_v = 0.1;
  const MeasurementSet data = simulate_measurements(u, nc, rng);
  int clamped = 0;
  for (int c = 0; c < 5; ++c) {
    const AnalyticReconstruction rec = analytic_reconstruct(data, {c, 0});
    EXPECT_LE(unitarity_defect(rec.unitary.matrix()), 1e-10);
    EXPECT_GT(rec.raw_defect, 1e-6);
    clamped += rec.clamped;
  }
  EXPECT_GT(clamped, 0);
}

TEST(AnalyticReconstruct, UnusableAnchorAndRangeErrors) {
  // Identity: input 0 never reaches output 1.
  const MeasurementSet data = noiseless_data(UnitaryMatrix::identity(3));
  EXPECT_THROW(analytic_reconstruct(data, {0, 1}), AnchorUnusable);
  EXPECT_THROW(analytic_reconstruct(data, {3, 0}), DomainError);
}

TEST(AnalyticReconstruct, MissingVisibilityMakesAnchorUnusable) {
  Rng rng(73);
  const MeasurementSet full = noiseless_data(haar_random_unitary(3, rng));
  const MeasurementSet empty(3, full.probabilities(), full.probability_errors(), {});
  EXPECT_THROW(analytic_reconstruct(empty, {0, 0}), AnchorUnusable);
}

TEST(SeedPool, SevenModesKeepsTwentyOfFortyNine) {
  Rng rng(74);
  NoiseConfig nc;
  const MeasurementSet data = simulate_measurements(haar_random_unitary(7, rng), nc, rng);
  const SeedPool pool = seed_pool(data, 20, 0.5);
  EXPECT_EQ(pool.candidates.size(), 49u);
  EXPECT_EQ(pool.seeds.size(), 20u);
  EXPECT_EQ(pool.unitaries.size(), 20u);
  EXPECT_EQ(pool.status, SeedStatus::kOk);
  bool varied = false;
  for (std::size_t k = 1; k < pool.candidates.size(); ++k) {
    EXPECT_LE(pool.candidates[k - 1].fit.chi2, pool.candidates[k].fit.chi2);
    varied |= pool.candidates[k - 1].fit.chi2 != pool.candidates[k].fit.chi2;
  }
  EXPECT_TRUE(varied);
  for (std::size_t k = 0; k < pool.seeds.size(); ++k)
    EXPECT_NEAR(fitness(pool.seeds[k], data, 0.5).chi2, pool.candidates[k].fit.chi2,
                1e-6 * pool.candidates[k].fit.chi2);
}

TEST(SeedPool, AllCandidatesWhenAskedForEverything) {
  Rng rng(75);
  const UnitaryMatrix u = haar_random_unitary(4, rng);
  const SeedPool pool = seed_pool(noiseless_data(u), 16, 0.5);
  ASSERT_EQ(pool.seeds.size(), 16u);
  for (std::size_t k = 0; k < 16; ++k) {
    EXPECT_LE(pool.candidates[k].fit.chi2, 1e-4);
    EXPECT_GE(align_gauge(dna_to_unitary(pool.seeds[k]), u).fidelity, 1.0 - 1e-6);
  }
}

TEST(SeedPool, UnusableAnchorsSortLastWithReasons) {
  const SeedPool pool = seed_pool(noiseless_data(UnitaryMatrix::identity(3)), 9, 0.5);
  EXPECT_EQ(pool.status, SeedStatus::kPartial);
  EXPECT_EQ(pool.seeds.size(), 3u);
  for (std::size_t k = 0; k < 9; ++k) {
    EXPECT_EQ(pool.candidates[k].usable, k < 3);
    if (k >= 3) {
      EXPECT_FALSE(pool.candidates[k].reason.empty());
    }
  }
}

TEST(SeedPool, NothingUsable) {
  const MeasurementSet data(2, Eigen::MatrixXd::Constant(2, 2, 0.5), Eigen::MatrixXd::Constant(2, 2, 0.01), {});
  const SeedPool pool = seed_pool(data, 4, 0.5);
  EXPECT_EQ(pool.status, SeedStatus::kNoUsableAnchors);
  EXPECT_TRUE(pool.seeds.empty());
}

TEST(SeedPool, SeededGaNeverEndsWorseThanBestSeed) {
  Rng rng(76);
  NoiseConfig nc;
  nc.sigma_v = 0.02;
  const MeasurementSet data = simulate_measurements(haar_random_unitary(4, rng), nc, rng);
  const SeedPool pool = seed_pool(data, 10, 0.5);
  GaConfig cfg;
  cfg.population = 30;
  cfg.analytic_seeds = 10;
  cfg.random_seeds = 20;
  cfg.max_iterations = 200;
  cfg.threads = 1;
  const EvolveResult r = evolve(data, cfg, pool.seeds);
  EXPECT_LE(r.best_fitness.chi2, fitness(pool.seeds.front(), data, 0.5).chi2);
}

}  // namespace
}  // namespace reckga
