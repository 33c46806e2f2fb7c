// Copyright 2026 The qemerge Authors
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

#ifndef QEMERGE_CORE_HPP_
#define QEMERGE_CORE_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qemerge {

using Index = Eigen::Index;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using RMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double kAlgebra = 1e-10;      // commutator/anticommutator identities
inline constexpr double kExact = 1e-12;        // trace, hermiticity, round trips
inline constexpr double kPositivity = 1e-10;   // smallest admissible eigenvalue is -kPositivity
inline constexpr double kDegeneracy = 1e-9;    // relative to spectral range
inline constexpr double kPureCopurity = 1e-10;
inline constexpr double kBranch = 1e-12;       // unreachable measurement branch
inline constexpr double kNorm = 1e-10;
}  // namespace tol

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a state fails positivity or a probability leaves [0, 1].
class InvalidStateError : public Error {
 public:
  InvalidStateError(const std::string& what, double witness)
      : Error(what), witness_(witness) {}
  /// Offending number: most negative eigenvalue, copurity, or probability.
  double witness() const noexcept { return witness_; }

 private:
  double witness_;
};

class InvalidBasisError : public Error {
 public:
  using Error::Error;
};

class CapExceededError : public Error {
 public:
  using Error::Error;
};

/// An operation that needs a two-level (involutory) operator received another one.
class NotTwoLevelError : public Error {
 public:
  using Error::Error;
};

class UnreachableBranchError : public Error {
 public:
  UnreachableBranchError(const std::string& what, double probability)
      : Error(what), probability_(probability) {}
  double probability() const noexcept { return probability_; }

 private:
  double probability_;
};

template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
  using std::abs;
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  if (m.size() == 0) return Real(0);
  return m.cwiseAbs().maxCoeff();
}

template <typename Scalar>
CMatrix<Scalar> commutator(const CMatrix<Scalar>& a, const CMatrix<Scalar>& b) {
  return a * b - b * a;
}

template <typename Scalar>
CMatrix<Scalar> anticommutator(const CMatrix<Scalar>& a, const CMatrix<Scalar>& b) {
  return a * b + b * a;
}

template <typename Scalar>
CMatrix<Scalar> kron(const CMatrix<Scalar>& a, const CMatrix<Scalar>& b) {
  CMatrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <typename Scalar>
Scalar hermiticity_defect(const CMatrix<Scalar>& m) {
  return max_abs((m - m.adjoint()).eval());
}

/// tr(a b) without forming the product.
template <typename Scalar>
Complex<Scalar> trace_product(const CMatrix<Scalar>& a, const CMatrix<Scalar>& b) {
  return (a.transpose().array() * b.array()).sum();
}

/// Pauli matrices: 0 is the identity, 1..3 are tau_1..tau_3.
template <typename Scalar>
CMatrix<Scalar> pauli(int which) {
  using C = Complex<Scalar>;
  CMatrix<Scalar> m(2, 2);
  switch (which) {
    case 0: m << C(1), C(0), C(0), C(1); break;
    case 1: m << C(0), C(1), C(1), C(0); break;
    case 2: m << C(0), C(0, -1), C(0, 1), C(0); break;
    case 3: m << C(1), C(0), C(0), C(-1); break;
    default: throw std::invalid_argument("pauli index must be 0..3");
  }
  return m;
}

/// Multiplies the vector by a phase so that its first component of largest
/// modulus is real and non-negative. Ties within `tie` are broken by lowest index.
template <typename Scalar>
CVector<Scalar> fix_phase(const CVector<Scalar>& v, Scalar tie = Scalar(1e-9)) {
  if (v.size() == 0) return v;
  Scalar best = 0;
  for (Index i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v(i)));
  if (best == Scalar(0)) return v;
  Index pivot = 0;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= best - tie * best) {
      pivot = i;
      break;
    }
  }
  const Complex<Scalar> phase = std::conj(v(pivot)) / std::abs(v(pivot));
  CVector<Scalar> out = v * phase;
  out(pivot) = Complex<Scalar>(std::abs(v(pivot)), 0);
  return out;
}

/// Eigen-decomposition of a hermitian matrix. Eigenvalues ascending.
template <typename Scalar>
struct HermitianEigen {
  RVector<Scalar> values;
  CMatrix<Scalar> vectors;  // columns, phase-fixed
};

template <typename Scalar>
HermitianEigen<Scalar> hermitian_eigen(const CMatrix<Scalar>& m) {
  const CMatrix<Scalar> sym = (m + m.adjoint()) * Scalar(0.5);
  Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("hermitian eigensolver failed");
  HermitianEigen<Scalar> out{solver.eigenvalues(), solver.eigenvectors()};
  for (Index j = 0; j < out.vectors.cols(); ++j)
    out.vectors.col(j) = fix_phase<Scalar>(out.vectors.col(j));
  return out;
}

template <typename Scalar>
RVector<Scalar> hermitian_eigenvalues(const CMatrix<Scalar>& m) {
  const CMatrix<Scalar> sym = (m + m.adjoint()) * Scalar(0.5);
  Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("hermitian eigensolver failed");
  return solver.eigenvalues();
}

/// Groups sorted values whose neighbours differ by at most `threshold`.
/// Returns the start offset of each group plus a final sentinel.
template <typename Scalar>
std::vector<Index> cluster_sorted(const RVector<Scalar>& sorted, Scalar threshold) {
  std::vector<Index> starts;
  for (Index i = 0; i < sorted.size(); ++i)
    if (i == 0 || std::abs(sorted(i) - sorted(i - 1)) > threshold) starts.push_back(i);
  starts.push_back(sorted.size());
  return starts;
}

/// Distinct values of a set, descending; values within `threshold` merge.
template <typename Scalar>
std::vector<Scalar> distinct_descending(std::vector<Scalar> values, Scalar threshold) {
  std::sort(values.begin(), values.end(), std::greater<Scalar>());
  std::vector<Scalar> out;
  for (Scalar v : values)
    if (out.empty() || std::abs(out.back() - v) > threshold) out.push_back(v);
  return out;
}

}  // namespace qemerge

#endif  // QEMERGE_CORE_HPP_
