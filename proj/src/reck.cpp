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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace reckga {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegeneratePivot = 1e-12;

// Applies the embedded 2x2 block on columns (p, p+1): u <- u * embed(block).
void apply_right(ComplexMatrix& u, int p, const Eigen::Matrix2cd& block) {
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    const Complex a = u(r, p);
    const Complex b = u(r, p + 1);
    u(r, p) = a * block(0, 0) + b * block(1, 0);
    u(r, p + 1) = a * block(0, 1) + b * block(1, 1);
  }
}

}  // namespace

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

bool is_valid_gene(const Gene& g) {
  return std::isfinite(g.t) && g.t >= 0.0 && g.t < 1.0 && std::isfinite(g.alpha) &&
         g.alpha >= 0.0 && g.alpha < kTwoPi && std::isfinite(g.beta) && g.beta >= 0.0 &&
         g.beta < kTwoPi;
}

TriangleSchedule TriangleSchedule::for_modes(int m, int version) {
  if (m < 2) throw DomainError("schedule needs m >= 2");
  if (version != kScheduleVersion)
    throw DomainError("unsupported schedule version " + std::to_string(version));
  // Elimination order nulls row m-1 with pairs (0,1)..(m-2,m-1), then row
  // m-2, and so on. Slots are that order reversed.
  std::vector<int> lower;
  lower.reserve(static_cast<std::size_t>(gene_count(m)));
  for (int row = m - 1; row >= 1; --row)
    for (int p = 0; p < row; ++p) lower.push_back(p);
  std::reverse(lower.begin(), lower.end());
  return TriangleSchedule(m, version, std::move(lower));
}

Dna::Dna(int m, std::vector<Gene> genes) : m_(m), genes_(std::move(genes)) {
  if (m_ < 2) throw DomainError("Dna needs m >= 2");
  if (size() != gene_count(m_))
    throw ShapeError("Dna for m=" + std::to_string(m_) + " needs " + std::to_string(gene_count(m_)) +
                     " genes, got " + std::to_string(size()));
  for (int k = 0; k < size(); ++k)
    if (!is_valid_gene(genes_[static_cast<std::size_t>(k)]))
      throw DomainError("gene " + std::to_string(k) + " violates t in [0,1), phases in [0,2pi)");
}

Eigen::Matrix2cd gene_block(const Gene& g) {
  if (!(g.t >= 0.0 && g.t < 1.0)) throw DomainError("gene transmittivity outside [0, 1)");
  if (!std::isfinite(g.alpha) || !std::isfinite(g.beta)) throw DomainError("gene phase not finite");
  const double st = std::sqrt(g.t);
  const double sr = std::sqrt(1.0 - g.t);
  const Complex ea = std::polar(1.0, g.alpha);
  const Complex eb = std::polar(1.0, g.beta);
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd out;
  out << st * ea, i * sr * eb,
         i * sr * ea, st * eb;
  return out;
}

UnitaryMatrix dna_to_unitary(const Dna& d, const TriangleSchedule& sched) {
  if (d.modes() != sched.modes() || d.size() != sched.size())
    throw ShapeError("dna_to_unitary: DNA and schedule disagree on size");
  const int m = d.modes();
  ComplexMatrix u = ComplexMatrix::Identity(m, m);
  for (int k = 0; k < d.size(); ++k) apply_right(u, sched.lower_mode(k), gene_block(d[k]));
  return UnitaryMatrix(std::move(u));
}

UnitaryMatrix dna_to_unitary(const Dna& d) {
  return dna_to_unitary(d, TriangleSchedule::for_modes(d.modes()));
}

Gene random_gene(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  Gene g;
  g.t = unit(rng);
  g.alpha = phase(rng);
  g.beta = phase(rng);
  return g;
}

Dna random_dna(int m, Rng& rng) {
  if (m < 2) throw DomainError("random_dna: m must be >= 2");
  std::vector<Gene> genes(static_cast<std::size_t>(gene_count(m)));
  for (auto& g : genes) g = random_gene(rng);
  return Dna(m, std::move(genes));
}

Dna unitary_to_dna(const UnitaryMatrix& u) {
  const int m = u.dim();
  if (m < 2) throw DomainError("unitary_to_dna: m must be >= 2");
  if (unitarity_defect(u.matrix()) > 1e-8) throw DomainError("unitary_to_dna: input is not unitary");

  const TriangleSchedule sched = TriangleSchedule::for_modes(m);
  const int count = sched.size();
  std::vector<Gene> genes(static_cast<std::size_t>(count));
  ComplexMatrix w = u.matrix();

  // w * T_{M-1}^dagger * ... * T_0^dagger ends up diagonal; that diagonal is
  // an output phase layer and is dropped.
  int step = 0;
  for (int row = m - 1; row >= 1; --row) {
    for (int p = 0; p < row; ++p, ++step) {
      const Complex a = w(row, p);
      const Complex b = w(row, p + 1);
      const double ma = std::abs(a);
      const double mb = std::abs(b);
      Gene g;
      if (ma < kDegeneratePivot) {
        // Already nulled. The nearest representable gene is applied as identity
        // so its 1e-6 leakage does not seed later pivots.
        g.t = kMaxTransmittivity;
        genes[static_cast<std::size_t>(count - 1 - step)] = g;
        continue;
      } else if (mb < kDegeneratePivot) {
        g.t = 0.0;
      } else {
        g.t = std::min(mb * mb / (ma * ma + mb * mb), kMaxTransmittivity);
        g.alpha = wrap_phase(std::arg(a) - std::arg(b) - std::numbers::pi / 2.0);
      }
      apply_right(w, p, gene_block(g).adjoint());
      genes[static_cast<std::size_t>(count - 1 - step)] = g;
    }
  }
  return Dna(m, std::move(genes));
}

}  // namespace reckga
