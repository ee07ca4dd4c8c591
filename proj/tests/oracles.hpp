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

// Reference implementations used only by tests. They deliberately avoid the
// library's code paths: plain loops, explicit embeddings, first-quantized
// two-photon states.

#include <cmath>
#include <complex>
#include <vector>

#include "reckga/linalg.hpp"
#include "reckga/reck.hpp"

namespace reckga::oracle {

inline ComplexMatrix naive_multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Complex s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

inline double gram_defect(const ComplexMatrix& u) {
  double worst = 0.0;
  const Eigen::Index n = u.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) s += std::conj(u(k, i)) * u(k, j);
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

// Gene matrix written out entry by entry.
inline ComplexMatrix gene_matrix(double t, double alpha, double beta) {
  const Complex i(0.0, 1.0);
  ComplexMatrix g(2, 2);
  g(0, 0) = std::sqrt(t) * std::exp(i * alpha);
  g(0, 1) = i * std::sqrt(1.0 - t) * std::exp(i * beta);
  g(1, 0) = i * std::sqrt(1.0 - t) * std::exp(i * alpha);
  g(1, 1) = std::sqrt(t) * std::exp(i * beta);
  return g;
}

// Embeds each gene into an m x m identity and multiplies the full matrices.
inline ComplexMatrix compose(const Dna& d) {
  const int m = d.modes();
  std::vector<int> pairs;
  for (int row = m - 1; row >= 1; --row)
    for (int p = 0; p < row; ++p) pairs.insert(pairs.begin(), p);
  ComplexMatrix u = ComplexMatrix::Identity(m, m);
  for (int k = 0; k < d.size(); ++k) {
    ComplexMatrix e = ComplexMatrix::Identity(m, m);
    const ComplexMatrix g = gene_matrix(d[k].t, d[k].alpha, d[k].beta);
    const int p = pairs[static_cast<std::size_t>(k)];
    e(p, p) = g(0, 0);
    e(p, p + 1) = g(0, 1);
    e(p + 1, p) = g(1, 0);
    e(p + 1, p + 1) = g(1, 1);
    u = naive_multiply(u, e);
  }
  return u;
}

struct TwoPhoton {
  double distinguishable;
  double indistinguishable;
};

// Two photons as a first-quantized wavefunction in C^m (x) C^m evolved by
// U (x) U. Bosons start in the symmetrized state (|i,j> + |j,i>)/sqrt2 and are
// projected on the symmetrized output (|p,q> + |q,p>)/sqrt2. Distinguishable
// photons start in |i,j> and either ordering of the detection counts.
inline TwoPhoton second_quantized(const ComplexMatrix& u, int i, int j, int p, int q) {
  const int m = static_cast<int>(u.rows());
  const int n = m * m;
  ComplexMatrix uu(n, n);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) uu(a * m + b, c * m + d) = u(a, c) * u(b, d);

  auto basis = [m, n](int a, int b) {
    ComplexVector v = ComplexVector::Zero(n);
    v(a * m + b) = 1.0;
    return v;
  };
  const double r = 1.0 / std::sqrt(2.0);
  const ComplexVector boson_in = r * (basis(i, j) + basis(j, i));
  const ComplexVector boson_out = r * (basis(p, q) + basis(q, p));
  const ComplexVector evolved_b = uu * boson_in;
  const double pq = std::norm(boson_out.dot(evolved_b));

  const ComplexVector evolved_d = uu * basis(i, j);
  const double pd = std::norm(basis(p, q).dot(evolved_d)) + std::norm(basis(q, p).dot(evolved_d));
  return {pd, pq};
}

}  // namespace reckga::oracle
