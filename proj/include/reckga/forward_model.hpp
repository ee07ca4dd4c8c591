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

#include <Eigen/Dense>

#include <vector>

#include "reckga/linalg.hpp"

namespace reckga {

// Two-photon entries whose distinguishable-photon probability falls below
// this are undefined: the visibility ratio is numerically meaningless there.
inline constexpr double kDistinguishableFloor = 1e-9;
inline constexpr double kDefaultProbabilityErrorFloor = 1e-4;
inline constexpr double kDefaultVisibilityErrorFloor = 1e-3;

// Number of collision-free mode pairs (i < j) among m modes.
constexpr int pair_count(int m) { return m * (m - 1) / 2; }

// Position of pair (i, j), i < j, in lexicographic order.
constexpr int pair_index(int i, int j, int m) { return i * m - i * (i + 1) / 2 + (j - i - 1); }

// Visibility for input modes (i, j) and output modes (p, q); i < j, p < q.
struct VisibilityEntry {
  int i = 0, j = 0, p = 0, q = 0;
  double value = 0.0;
  double error = 0.0;
};

struct TwoPhotonPrediction {
  double distinguishable = 0.0;    // P^d = |U_pi U_qj|^2 + |U_pj U_qi|^2
  double indistinguishable = 0.0;  // P^q = |U_pi U_qj + U_pj U_qi|^2
  double visibility = 0.0;         // (P^d - P^q) / P^d, 0 when undefined
  bool defined = false;            // P^d >= kDistinguishableFloor
};

// Single-photon probabilities (indexed [input][output]) and two-photon
// visibilities, each with a positive error. Validated on construction.
class MeasurementSet {
 public:
  MeasurementSet(int m, Eigen::MatrixXd p_value, Eigen::MatrixXd p_error,
                 std::vector<VisibilityEntry> visibilities);

  int modes() const { return m_; }
  const Eigen::MatrixXd& probabilities() const { return p_; }
  const Eigen::MatrixXd& probability_errors() const { return dp_; }
  const std::vector<VisibilityEntry>& visibilities() const { return v_; }

  int single_count() const { return m_ * m_; }
  int visibility_count() const { return static_cast<int>(v_.size()); }
  int total_count() const { return single_count() + visibility_count(); }

  // Entry for inputs {i, j} and outputs {p, q} in either order, or nullptr.
  const VisibilityEntry* find(int i, int j, int p, int q) const;

 private:
  int m_;
  Eigen::MatrixXd p_;
  Eigen::MatrixXd dp_;
  std::vector<VisibilityEntry> v_;
  std::vector<int> lookup_;  // pair_index(in) * pairs + pair_index(out) -> v_ slot or -1
};

// P(i, j) = |U(j, i)|^2: photon in input i leaves from output j.
Eigen::MatrixXd predict_single(const UnitaryMatrix& u);

TwoPhotonPrediction predict_two_photon(const ComplexMatrix& u, int i, int j, int p, int q);

// Every collision-free (i<j, p<q) entry, input pair major. Undefined entries
// are returned with defined = false.
std::vector<VisibilityEntry> predict_visibilities(const UnitaryMatrix& u,
                                                  std::vector<bool>* defined = nullptr);

struct NoiseConfig {
  bool noiseless = false;
  long shots = 10000;     // single-photon events per input mode
  double sigma_v = 0.01;  // Gaussian width on visibilities
  double p_error_floor = kDefaultProbabilityErrorFloor;
  double v_error_floor = kDefaultVisibilityErrorFloor;

  void validate() const;
};

// Synthetic data: multinomial counts for P, Gaussian-perturbed V. With
// `noiseless` the exact predictions are returned with floor errors. Undefined
// visibilities are dropped.
MeasurementSet simulate_measurements(const UnitaryMatrix& u, const NoiseConfig& noise, Rng& rng);

}  // namespace reckga
