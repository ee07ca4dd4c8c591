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

// Largest transmittivity a gene may carry; t lives in [0, 1).
inline constexpr double kMaxTransmittivity = 1.0 - 1e-12;
inline constexpr int kScheduleVersion = 1;

// One phase-shifter / phase-shifter / beam-splitter unit.
struct Gene {
  double t = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  friend bool operator==(const Gene&, const Gene&) = default;
};

bool is_valid_gene(const Gene& g);

// Number of genes for an m-mode network: m(m-1)/2.
constexpr int gene_count(int m) { return m * (m - 1) / 2; }

// Which adjacent mode pair (p, p+1) every gene slot acts on. Genes are
// multiplied left to right: U = T_0 T_1 ... T_{M-1}, so the last slot acts
// first on the input. The triangle is laid out diagonal by diagonal.
class TriangleSchedule {
 public:
  static TriangleSchedule for_modes(int m, int version = kScheduleVersion);

  int modes() const { return m_; }
  int version() const { return version_; }
  int size() const { return static_cast<int>(lower_.size()); }
  // Lower mode index p of the pair acted on by `slot`.
  int lower_mode(int slot) const { return lower_[static_cast<std::size_t>(slot)]; }
  const std::vector<int>& lower_modes() const { return lower_; }

 private:
  TriangleSchedule(int m, int version, std::vector<int> lower)
      : m_(m), version_(version), lower_(std::move(lower)) {}
  int m_;
  int version_;
  std::vector<int> lower_;
};

// Ordered genes for an m-mode network. Validated on construction.
class Dna {
 public:
  Dna(int m, std::vector<Gene> genes);

  int modes() const { return m_; }
  int size() const { return static_cast<int>(genes_.size()); }
  const std::vector<Gene>& genes() const { return genes_; }
  const Gene& operator[](int k) const { return genes_[static_cast<std::size_t>(k)]; }

  friend bool operator==(const Dna&, const Dna&) = default;

 private:
  int m_;
  std::vector<Gene> genes_;
};

// BS(t) * diag(e^{i alpha}, e^{i beta}) with BS(t) = [[sqrt t, i sqrt(1-t)], [i sqrt(1-t), sqrt t]].
Eigen::Matrix2cd gene_block(const Gene& g);

UnitaryMatrix dna_to_unitary(const Dna& d, const TriangleSchedule& sched);
UnitaryMatrix dna_to_unitary(const Dna& d);

// Fresh gene: t ~ U[0,1), alpha, beta ~ U[0, 2 pi).
Gene random_gene(Rng& rng);
Dna random_dna(int m, Rng& rng);

// Reck elimination. The result reproduces u up to diagonal phases on both sides.
Dna unitary_to_dna(const UnitaryMatrix& u);

// Wraps a phase into [0, 2 pi).
double wrap_phase(double phi);

}  // namespace reckga
