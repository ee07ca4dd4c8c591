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

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "reckga/forward_model.hpp"
#include "reckga/ga.hpp"
#include "reckga/reck.hpp"

namespace reckga {

// Minimum single-photon probability P(input -> output) at the anchor corner.
inline constexpr double kAnchorFloor = 1e-9;

// Base input/output modes of a minimal data subset. The inversion fixes
// column `input` and row `output` of U real and non-negative.
struct Anchor {
  int input = 0;
  int output = 0;

  friend bool operator==(const Anchor&, const Anchor&) = default;
};

// The data cannot support inversion from this anchor (entry below floor, or
// a required visibility missing). Callers move on to the next anchor.
class AnchorUnusable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalyticReconstruction {
  UnitaryMatrix unitary;     // polar projection of the raw estimate
  Anchor anchor;
  int clamped = 0;           // phase cosines pushed back into [-1, 1]
  double raw_defect = 0.0;   // max|R^dagger R - I| of the raw estimate R
};

// Moduli from sqrt(P), phases from the visibilities of the anchored minimal
// set (sign branches settled against already-fixed entries), then projected
// to the nearest unitary.
AnalyticReconstruction analytic_reconstruct(const MeasurementSet& data, Anchor anchor);

struct SeedCandidate {
  Anchor anchor;
  bool usable = false;
  FitnessValue fit;        // against the full data; valid when usable
  int clamped = 0;
  std::string reason;      // why the anchor was unusable
};

enum class SeedStatus { kOk, kPartial, kNoUsableAnchors };

struct SeedPool {
  std::vector<Dna> seeds;                  // best first
  std::vector<UnitaryMatrix> unitaries;    // aligned with `seeds`
  std::vector<SeedCandidate> candidates;   // all m^2 anchors: usable sorted by chi^2, then unusable
  SeedStatus status = SeedStatus::kOk;
};

std::string to_string(SeedStatus s);

// Reconstructs from every anchor, ranks by chi^2 on the full data and keeps the best s1.
SeedPool seed_pool(const MeasurementSet& data, int s1, double w);

}  // namespace reckga
