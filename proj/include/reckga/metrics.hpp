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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reckga/forward_model.hpp"
#include "reckga/ga.hpp"

namespace reckga {

// S = 1 - sum |V_data - V_u| / (2 d2), d2 = number of entries compared.
double similarity(const MeasurementSet& data, const UnitaryMatrix& u);

struct GateFidelity {
  double raw = 0.0;      // |Tr[a^dagger b]| / m
  double aligned = 0.0;  // after optimal diagonal phases (and conjugation)
  bool conjugated = false;
};

GateFidelity gate_fidelity(const UnitaryMatrix& a, const UnitaryMatrix& b);

enum class McMethod { kAnalytic, kGaShort };

std::string to_string(McMethod m);
McMethod mc_method_from_string(const std::string& s);

struct MonteCarloOptions {
  McMethod method = McMethod::kAnalytic;
  double weight = 0.5;
  GaConfig ga_short = [] {
    GaConfig c;
    c.population = 40;
    c.analytic_seeds = 10;
    c.random_seeds = 30;
    c.max_iterations = 300;
    c.stall_window = 100;
    c.threads = 1;
    return c;
  }();
  int threads = 1;
  // When set, the similarity of this unitary is also evaluated on every resample.
  std::optional<UnitaryMatrix> evaluated;
};

struct MonteCarloResult {
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;
  std::optional<double> mean_similarity;
  std::optional<double> std_similarity;
  int samples = 0;   // successful resamples
  int failures = 0;  // resamples whose reconstruction failed
  long clipped = 0;  // resampled entries clipped into range
};

class MonteCarloError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Resamples every entry from N(value, error) (P clipped to [0, 1], V to <= 1),
// reconstructs, and reports the gauge-aligned fidelity against `reference`.
// Each resample has its own stream derived from one draw of `rng`.
MonteCarloResult monte_carlo_uncertainty(const MeasurementSet& data, const UnitaryMatrix& reference, int n,
                                         Rng& rng, const MonteCarloOptions& opts = {});

// One Gaussian resample of the data set. `clipped` counts clip events.
MeasurementSet resample(const MeasurementSet& data, Rng& rng, long* clipped = nullptr);

struct EvaluationReport {
  int m = 0;
  double weight = 0.5;
  double chi2_p = 0.0;
  double chi2_v = 0.0;
  double chi2 = 0.0;
  double similarity = 0.0;
  std::optional<double> similarity_std;
  std::optional<double> raw_fidelity;
  std::optional<double> aligned_fidelity;
  std::optional<bool> conjugated;
  std::optional<double> mc_mean_fidelity;
  std::optional<double> mc_std_fidelity;
  std::optional<int> mc_samples;
  std::optional<int> mc_failures;
  std::optional<long> mc_clipped;
  std::optional<std::string> mc_method;
  int visibility_entries = 0;
  int excluded_entries = 0;
  std::vector<std::string> flags;
};

struct EvaluateOptions {
  double weight = 0.5;
  std::optional<UnitaryMatrix> reference;
  int mc_samples = 0;  // 0 disables Monte Carlo
  std::uint64_t mc_seed = 0;
  MonteCarloOptions mc;
};

EvaluationReport evaluate(const MeasurementSet& data, const UnitaryMatrix& u, const EvaluateOptions& opts);

}  // namespace reckga
