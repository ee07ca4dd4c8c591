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

#include <cmath>
#include <complex>

#include "reckga/errors.hpp"
#include "reckga/rng.hpp"

namespace reckga {

template <typename Scalar>
using ComplexMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;

// Tolerance for matrices built in memory.
inline constexpr double kUnitaryTol = 1e-10;
// Tolerance for matrices read back from text files.
inline constexpr double kParsedUnitaryTol = 1e-6;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto& z = m(i, j);
      if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) return false;
    }
  return true;
}

template <typename DerivedA, typename DerivedB>
auto multiply(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows())
    throw ShapeError("multiply: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  typename DerivedA::PlainObject out = a * b;
  if (!all_finite(out)) throw DomainError("multiply: non-finite result");
  return out;
}

// max_ij |(m^dagger m - I)_ij|
template <typename Derived>
typename Derived::RealScalar unitarity_defect(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw ShapeError("unitarity check needs a square matrix");
  using Plain = typename Derived::PlainObject;
  const Plain gram = m.adjoint() * m;
  return (gram - Plain::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool check_unitary(const Eigen::MatrixBase<Derived>& m, typename Derived::RealScalar tol) {
  if (m.rows() != m.cols()) throw ShapeError("unitarity check needs a square matrix");
  if (!all_finite(m)) return false;
  return unitarity_defect(m) <= tol;
}

// |Tr[a^dagger b]| / m
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar trace_fidelity(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ShapeError("trace fidelity needs two square matrices of equal size");
  return std::abs((a.adjoint() * b).trace()) / static_cast<typename DerivedA::RealScalar>(a.rows());
}

// Square complex matrix validated as unitary on construction. Immutable.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(ComplexMatrix m, double tol = kUnitaryTol);

  static UnitaryMatrix identity(int m) { return UnitaryMatrix(ComplexMatrix::Identity(m, m)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  UnitaryMatrix adjoint() const { return UnitaryMatrix(m_.adjoint()); }
  UnitaryMatrix conjugate() const { return UnitaryMatrix(m_.conjugate()); }

 private:
  ComplexMatrix m_;
};

inline UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  return UnitaryMatrix(multiply(a.matrix(), b.matrix()));
}

// Haar-distributed sample: QR of a complex Ginibre matrix with the phases of
// diag(R) moved into Q.
UnitaryMatrix haar_random_unitary(int m, Rng& rng);

// Diagonal matrix of unit-modulus phases e^{i phi_k}.
ComplexMatrix phase_diagonal(const Eigen::VectorXd& phases);

struct GaugeAlignment {
  UnitaryMatrix aligned;   // D1 * a' * D2, with a' = a or conj(a)
  double fidelity = 0.0;   // |Tr[aligned^dagger b]| / m
  bool conjugated = false;
  ComplexVector left;      // diag(D1)
  ComplexVector right;     // diag(D2)
};

// Maximizes |Tr[(D1 a D2)^dagger b]| / m over unit-modulus diagonals D1, D2,
// also trying conj(a). The returned `aligned` has Tr[aligned^dagger b] real
// and non-negative.
GaugeAlignment align_gauge(const UnitaryMatrix& a, const UnitaryMatrix& b);

// Closest unitary in Frobenius norm (polar factor): W V^dagger from the SVD.
ComplexMatrix nearest_unitary(const ComplexMatrix& m);

}  // namespace reckga
