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

#include "reckga/forward_model.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "reckga/reck.hpp"

namespace reckga {
namespace {

UnitaryMatrix balanced_coupler() { return dna_to_unitary(Dna(2, {{0.5, 0.0, 0.0}})); }

Eigen::VectorXd random_phases(int n, Rng& rng) {
  std::uniform_real_distribution<double> phi(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXd v(n);
  for (int k = 0; k < n; ++k) v(k) = phi(rng);
  return v;
}

TEST(PairIndex, Lexicographic) {
  for (int m = 2; m <= 8; ++m) {
    int expected = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) EXPECT_EQ(pair_index(i, j, m), expected++);
    EXPECT_EQ(expected, pair_count(m));
  }
}

TEST(PredictSingle, Fixtures) {
  EXPECT_EQ(predict_single(UnitaryMatrix::identity(4)), Eigen::MatrixXd::Identity(4, 4));
  EXPECT_LE((predict_single(balanced_coupler()).array() - 0.5).abs().maxCoeff(), 1e-15);
}

TEST(PredictSingle, ElementwiseOracleAndRowSums) {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const UnitaryMatrix u = haar_random_unitary(5, rng);
    const Eigen::MatrixXd p = predict_single(u);
    for (int i = 0; i < 5; ++i) {
      double row = 0.0;
      for (int j = 0; j < 5; ++j) {
        EXPECT_NEAR(p(i, j), std::pow(std::abs(u(j, i)), 2), 1e-15);
        row += p(i, j);
      }
      EXPECT_NEAR(row, 1.0, 1e-10);
    }
  }
}

TEST(PredictVisibilities, HomDip) {
  const auto v = predict_visibilities(balanced_coupler());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NEAR(v[0].value, 1.0, 1e-12);
  const TwoPhotonPrediction t = predict_two_photon(balanced_coupler().matrix(), 0, 1, 0, 1);
  EXPECT_NEAR(t.distinguishable, 0.5, 1e-15);
  EXPECT_NEAR(t.indistinguishable, 0.0, 1e-15);
}

TEST(PredictVisibilities, IdentityHasNoInterference) {
  const TwoPhotonPrediction t = predict_two_photon(ComplexMatrix::Identity(2, 2), 0, 1, 0, 1);
  EXPECT_EQ(t.distinguishable, 1.0);
  EXPECT_EQ(t.indistinguishable, 1.0);
  EXPECT_EQ(t.visibility, 0.0);
}

TEST(PredictVisibilities, MatchesSecondQuantizedOracle) {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 3;
    const UnitaryMatrix u = haar_random_unitary(m, rng);
    std::vector<bool> defined;
    const auto v = predict_visibilities(u, &defined);
    ASSERT_EQ(static_cast<int>(v.size()), pair_count(m) * pair_count(m));
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto o = oracle::second_quantized(u.matrix(), v[k].i, v[k].j, v[k].p, v[k].q);
      ASSERT_TRUE(defined[k]);
      EXPECT_NEAR(v[k].value, (o.distinguishable - o.indistinguishable) / o.distinguishable, 1e-10);
    }
  }
}

TEST(PredictVisibilities, Haar4Has36Entries) {
  Rng rng(33);
  EXPECT_EQ(predict_visibilities(haar_random_unitary(4, rng)).size(), 36u);
}

TEST(PredictVisibilities, BoundedAboveByOne) {
  Rng rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const UnitaryMatrix u = haar_random_unitary(5, rng);
    for (const auto& e : predict_visibilities(u)) {
      EXPECT_LE(e.value, 1.0 + 1e-15);
      EXPECT_GE(e.value, -1.0 - 1e-15);
    }
  }
}

TEST(PredictVisibilities, UndefinedWhenDistinguishableVanishes) {
  // Identity: inputs (0,1) can never reach outputs (2,3).
  std::vector<bool> defined;
  const auto v = predict_visibilities(UnitaryMatrix::identity(4), &defined);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const bool reachable = v[k].i == v[k].p && v[k].j == v[k].q;
    EXPECT_EQ(defined[k], reachable);
  }
}

TEST(ForwardModel, GaugeAndConjugationInvariance) {
  Rng rng(35);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + trial % 5;
    const UnitaryMatrix u = haar_random_unitary(m, rng);
    const UnitaryMatrix g(phase_diagonal(random_phases(m, rng)) * u.matrix() * phase_diagonal(random_phases(m, rng)));
    const UnitaryMatrix c = u.conjugate();
    EXPECT_LE((predict_single(u) - predict_single(g)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((predict_single(u) - predict_single(c)).cwiseAbs().maxCoeff(), 1e-12);
    const auto vu = predict_visibilities(u), vg = predict_visibilities(g), vc = predict_visibilities(c);
    for (std::size_t k = 0; k < vu.size(); ++k) {
      EXPECT_NEAR(vu[k].value, vg[k].value, 1e-12);
      EXPECT_NEAR(vu[k].value, vc[k].value, 1e-12);
    }
  }
}

TEST(Simulate, NoiselessEqualsPredictions) {
  Rng rng(36);
  const UnitaryMatrix u = haar_random_unitary(4, rng);
  NoiseConfig nc;
  nc.noiseless = true;
  const MeasurementSet data = simulate_measurements(u, nc, rng);
  EXPECT_EQ(data.probabilities(), predict_single(u));
  EXPECT_TRUE((data.probability_errors().array() == kDefaultProbabilityErrorFloor).all());
  const auto v = predict_visibilities(u);
  ASSERT_EQ(data.visibility_count(), 36);
  for (std::size_t k = 0; k < v.size(); ++k) {
    EXPECT_EQ(data.visibilities()[k].value, v[k].value);
    EXPECT_EQ(data.visibilities()[k].error, kDefaultVisibilityErrorFloor);
  }
}

TEST(Simulate, DropsUndefinedEntries) {
  Rng rng(37);
  NoiseConfig nc;
  nc.noiseless = true;
  const MeasurementSet data = simulate_measurements(UnitaryMatrix::identity(4), nc, rng);
  EXPECT_EQ(data.visibility_count(), 6);
}

TEST(Simulate, BinomialStatistics) {
  Rng rng(38);
  const UnitaryMatrix u = haar_random_unitary(2, rng);
  const Eigen::MatrixXd exact = predict_single(u);
  NoiseConfig nc;
  nc.shots = 10000;
  for (int trial = 0; trial < 20; ++trial) {
    const MeasurementSet data = simulate_measurements(u, nc, rng);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(data.probabilities().row(i).sum(), 1.0, 1e-12);
      for (int j = 0; j < 2; ++j) {
        const double p = exact(i, j);
        const double sigma = std::sqrt(p * (1 - p) / 1e4);
        EXPECT_LE(std::abs(data.probabilities()(i, j) - p), 5 * sigma + 1e-12);
        EXPECT_NEAR(data.probability_errors()(i, j), std::max(sigma, 1e-4), 0.2 * sigma + 1e-4);
      }
    }
  }
}

TEST(Simulate, GaussianVisibilityWidth) {
  Rng rng(39);
  const UnitaryMatrix u = haar_random_unitary(3, rng);
  NoiseConfig nc;
  nc.sigma_v = 0.01;
  const double exact = predict_visibilities(u)[0].value;
  std::vector<double> draws;
  for (int k = 0; k < 1000; ++k) draws.push_back(simulate_measurements(u, nc, rng).visibilities()[0].value - exact);
  double mean = 0.0;
  for (double d : draws) mean += d / draws.size();
  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean) / (draws.size() - 1);
  EXPECT_NEAR(std::sqrt(var), 0.01, 0.001);
}

TEST(Simulate, ConfigErrors) {
  Rng rng(40);
  const UnitaryMatrix u = UnitaryMatrix::identity(2);
  NoiseConfig nc;
  nc.shots = 0;
  EXPECT_THROW(simulate_measurements(u, nc, rng), ConfigError);
  nc.shots = 10;
  nc.sigma_v = -1.0;
  EXPECT_THROW(simulate_measurements(u, nc, rng), ConfigError);
}

TEST(MeasurementSet, CountsForSevenModes) {
  Rng rng(41);
  NoiseConfig nc;
  const MeasurementSet data = simulate_measurements(haar_random_unitary(7, rng), nc, rng);
  EXPECT_EQ(data.single_count(), 49);
  EXPECT_EQ(data.visibility_count(), 441);
  EXPECT_EQ(data.total_count(), 490);
}

TEST(MeasurementSet, Validation) {
  const Eigen::MatrixXd p = Eigen::MatrixXd::Constant(2, 2, 0.5);
  const Eigen::MatrixXd dp = Eigen::MatrixXd::Constant(2, 2, 0.01);
  EXPECT_NO_THROW(MeasurementSet(2, p, dp, {{0, 1, 0, 1, 0.9, 0.01}}));
  EXPECT_THROW(MeasurementSet(2, p, dp, {{0, 1, 0, 1, 1.1, 0.01}}), DomainError);
  EXPECT_THROW(MeasurementSet(2, p, dp, {{0, 1, 0, 1, 0.5, 0.0}}), DomainError);
  EXPECT_THROW(MeasurementSet(2, p, dp, {{0, 1, 0, 1, 0.5, 0.1}, {0, 1, 0, 1, 0.5, 0.1}}), DomainError);
  EXPECT_THROW(MeasurementSet(2, p, dp, {{1, 0, 0, 1, 0.5, 0.1}}), DomainError);
  EXPECT_THROW(MeasurementSet(3, p, dp, {}), ShapeError);
  Eigen::MatrixXd bad = p;
  bad(0, 0) = 1.5;
  EXPECT_THROW(MeasurementSet(2, bad, dp, {}), DomainError);
  const MeasurementSet ok(2, p, dp, {{0, 1, 0, 1, -0.3, 0.01}});
  ASSERT_NE(ok.find(1, 0, 1, 0), nullptr);
  EXPECT_EQ(ok.find(1, 0, 1, 0)->value, -0.3);
  EXPECT_EQ(ok.find(0, 0, 0, 1), nullptr);
}

}  // namespace
}  // namespace reckga
