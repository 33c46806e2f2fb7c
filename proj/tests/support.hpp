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

#ifndef QEMERGE_TESTS_SUPPORT_HPP_
#define QEMERGE_TESTS_SUPPORT_HPP_

#include <random>
#include <vector>

#include "qemerge/qemerge.hpp"

namespace qemerge::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline CMatrix<double> random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix<double> m(rows, cols);
  for (Index a = 0; a < rows; ++a)
    for (Index b = 0; b < cols; ++b) m(a, b) = {g(rng), g(rng)};
  return m;
}

/// Haar-ish unitary from the QR decomposition of a complex Gaussian matrix.
inline CMatrix<double> random_unitary(Index M, Rng& rng) {
  Eigen::HouseholderQR<CMatrix<double>> qr(random_gaussian(M, M, rng));
  return qr.householderQ() * CMatrix<double>::Identity(M, M);
}

inline CMatrix<double> random_hermitian(Index M, Rng& rng) {
  const CMatrix<double> g = random_gaussian(M, M, rng);
  return (g + g.adjoint()) * 0.5;
}

/// U diag(p) U^dagger with random weights; pure with probability `pure_fraction`.
inline CMatrix<double> random_density(Index M, Rng& rng, double pure_fraction = 0.2) {
  RVector<double> p(M);
  if (uniform(rng) < pure_fraction) {
    p.setZero();
    p(0) = 1;
  } else {
    std::exponential_distribution<double> e;
    for (Index a = 0; a < M; ++a) p(a) = e(rng);
    p /= p.sum();
  }
  const CMatrix<double> u = random_unitary(M, rng);
  CMatrix<double> rho = u * p.cast<Complex<double>>().asDiagonal() * u.adjoint();
  return (rho + rho.adjoint()) * 0.5;
}

inline BlochState<double> random_state(const BasisPtr<double>& basis, Rng& rng, double pure_fraction = 0.2) {
  return bloch_from_density(DensityMatrix<double>(random_density(basis->dimension(), rng, pure_fraction)), basis);
}

inline CVector<double> random_wave(Index M, Rng& rng) { return random_gaussian(M, 1, rng).col(0).normalized(); }

/// U diag(+-1) U^dagger with at least one eigenvalue of each sign; traceless
/// when `balanced`.
inline CMatrix<double> random_two_level_matrix(Index M, Rng& rng, bool balanced = false) {
  RVector<double> s(M);
  const Index plus = balanced ? M / 2 : 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(M - 1));
  for (Index a = 0; a < M; ++a) s(a) = a < plus ? 1.0 : -1.0;
  const CMatrix<double> u = random_unitary(M, rng);
  CMatrix<double> m = u * s.cast<Complex<double>>().asDiagonal() * u.adjoint();
  return (m + m.adjoint()) * 0.5;
}

inline QuantumOperator<double> random_two_level(const BasisPtr<double>& basis, Rng& rng, bool balanced = false) {
  return operator_from_matrix<double>(random_two_level_matrix(basis->dimension(), rng, balanced), basis);
}

inline QuantumOperator<double> random_operator(const BasisPtr<double>& basis, Rng& rng) {
  return operator_from_matrix<double>(random_hermitian(basis->dimension(), rng), basis);
}

inline RVector<double> unit_rho(Index n, Index k, double value) {
  RVector<double> r = RVector<double>::Zero(n);
  r(k) = value;
  return r;
}

}  // namespace qemerge::testing

#endif  // QEMERGE_TESTS_SUPPORT_HPP_
