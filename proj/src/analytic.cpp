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

#include <algorithm>
#include <cmath>
#include <numbers>

namespace reckga {

namespace {

// Elements this small carry no usable phase information.
constexpr double kNegligibleModulus = 1e-12;
constexpr int kPhaseScanSteps = 720;

double branch_score(const MeasurementSet& data, const ComplexMatrix& est,
                    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& known, int p, int i) {
  const int m = data.modes();
  double score = 0.0;
  for (int p2 = 0; p2 < m; ++p2) {
    if (p2 == p) continue;
    for (int i2 = 0; i2 < m; ++i2) {
      if (i2 == i || !known(p, i2) || !known(p2, i) || !known(p2, i2)) continue;
      const VisibilityEntry* e = data.find(i, i2, p, p2);
      if (!e) continue;
      const TwoPhotonPrediction t = predict_two_photon(est, e->i, e->j, e->p, e->q);
      if (!t.defined) continue;
      const double r = (e->value - t.visibility) / e->error;
      score += r * r;
    }
  }
  return score;
}

}  // namespace

AnalyticReconstruction analytic_reconstruct(const MeasurementSet& data, Anchor anchor) {
  const int m = data.modes();
  const int c0 = anchor.input;
  const int r0 = anchor.output;
  if (c0 < 0 || c0 >= m || r0 < 0 || r0 >= m) throw DomainError("anchor outside [0, m)");
  const Eigen::MatrixXd& prob = data.probabilities();

  // modulus(p, i) = |U(p, i)| = sqrt(P(i -> p))
  const Eigen::MatrixXd modulus = prob.transpose().cwiseMax(0.0).cwiseSqrt();
  if (prob(c0, r0) < kAnchorFloor)
    throw AnchorUnusable("P(" + std::to_string(c0) + "," + std::to_string(r0) + ") below floor");

  ComplexMatrix est = ComplexMatrix::Zero(m, m);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> known =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(m, m, false);
  for (int k = 0; k < m; ++k) {
    est(r0, k) = modulus(r0, k);
    est(k, c0) = modulus(k, c0);
    known(r0, k) = known(k, c0) = true;
  }

  int clamped = 0;
  for (int p = 0; p < m; ++p) {
    if (p == r0) continue;
    for (int i = 0; i < m; ++i) {
      if (i == c0) continue;
      const double a = modulus(r0, c0) * modulus(p, i);
      const double b = modulus(r0, i) * modulus(p, c0);
      double theta = 0.0;
      if (a > kNegligibleModulus && b > kNegligibleModulus) {
        const VisibilityEntry* e = data.find(c0, i, r0, p);
        if (!e)
          throw AnchorUnusable("missing visibility for inputs (" + std::to_string(c0) + "," +
                               std::to_string(i) + ") outputs (" + std::to_string(r0) + "," +
                               std::to_string(p) + ")");
        // V = -2ab cos(theta) / (a^2 + b^2)
        double c = -e->value * (a * a + b * b) / (2.0 * a * b);
        if (c > 1.0 || c < -1.0) {
          ++clamped;
          c = std::clamp(c, -1.0, 1.0);
        }
        theta = std::acos(c);
        known(p, i) = true;
        est(p, i) = std::polar(modulus(p, i), theta);
        if (theta != 0.0) {
          const double plus = branch_score(data, est, known, p, i);
          est(p, i) = std::polar(modulus(p, i), -theta);
          const double minus = branch_score(data, est, known, p, i);
          if (plus <= minus) est(p, i) = std::polar(modulus(p, i), theta);
        }
      } else if (a <= kNegligibleModulus) {
        known(p, i) = true;
        est(p, i) = modulus(p, i);
      } else {
        // The anchored relation says nothing about this phase; pick the
        // angle that best fits the entries already fixed (0 if none constrain it).
        known(p, i) = true;
        double best_score = 0.0;
        for (int step = 0; step < kPhaseScanSteps; ++step) {
          const double phi = 2.0 * std::numbers::pi * step / kPhaseScanSteps;
          est(p, i) = std::polar(modulus(p, i), phi);
          const double score = branch_score(data, est, known, p, i);
          if (step == 0 || score < best_score) {
            best_score = score;
            theta = phi;
          }
        }
        est(p, i) = std::polar(modulus(p, i), theta);
      }
    }
  }

  const double defect = unitarity_defect(est);
  return {UnitaryMatrix(nearest_unitary(est)), anchor, clamped, defect};
}

std::string to_string(SeedStatus s) {
  switch (s) {
    case SeedStatus::kOk: return "ok";
    case SeedStatus::kPartial: return "partial";
    case SeedStatus::kNoUsableAnchors: return "no_usable_anchors";
  }
  return "unknown";
}

SeedPool seed_pool(const MeasurementSet& data, int s1, double w) {
  const int m = data.modes();
  if (s1 < 0 || s1 > m * m) throw ConfigError("s1 must be in [0, m^2]");

  struct Usable {
    SeedCandidate candidate;
    UnitaryMatrix unitary;
  };
  std::vector<Usable> usable;
  std::vector<SeedCandidate> unusable;
  for (int input = 0; input < m; ++input)
    for (int output = 0; output < m; ++output) {
      SeedCandidate c;
      c.anchor = {input, output};
      try {
        AnalyticReconstruction r = analytic_reconstruct(data, c.anchor);
        c.usable = true;
        c.clamped = r.clamped;
        c.fit = fitness(r.unitary, data, w);
        usable.push_back({c, std::move(r.unitary)});
      } catch (const AnchorUnusable& e) {
        c.reason = e.what();
        unusable.push_back(c);
      }
    }
  std::stable_sort(usable.begin(), usable.end(),
                   [](const Usable& x, const Usable& y) { return x.candidate.fit.chi2 < y.candidate.fit.chi2; });

  SeedPool out;
  for (const Usable& u : usable) out.candidates.push_back(u.candidate);
  out.candidates.insert(out.candidates.end(), unusable.begin(), unusable.end());
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(s1), usable.size());
  for (std::size_t k = 0; k < keep; ++k) {
    out.seeds.push_back(unitary_to_dna(usable[k].unitary));
    out.unitaries.push_back(usable[k].unitary);
  }
  if (usable.empty())
    out.status = SeedStatus::kNoUsableAnchors;
  else if (keep < static_cast<std::size_t>(s1))
    out.status = SeedStatus::kPartial;
  return out;
}

}  // namespace reckga
