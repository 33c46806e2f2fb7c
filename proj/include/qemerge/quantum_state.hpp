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

#ifndef QEMERGE_QUANTUM_STATE_HPP_
#define QEMERGE_QUANTUM_STATE_HPP_

#include <memory>
#include <string>
#include <utility>

#include "qemerge/core.hpp"
#include "qemerge/generator_basis.hpp"

namespace qemerge {

/// State of the subsystem as the vector of basis-observable expectations rho_k.
/// Shorter coefficient vectors are zero-padded to M^2 - 1.
template <typename Scalar>
class BlochState {
 public:
  BlochState(BasisPtr<Scalar> basis, RVector<Scalar> rho) : basis_(std::move(basis)) {
    if (!basis_) throw DimensionError("Bloch state needs a basis");
    const Index n = basis_->size();
    if (rho.size() > n) throw DimensionError("more Bloch coefficients than generators");
    rho_ = RVector<Scalar>::Zero(n);
    rho_.head(rho.size()) = rho;
  }

  /// The equipartition state rho = 1/M.
  static BlochState equipartition(BasisPtr<Scalar> basis) {
    const Index n = basis->size();
    return BlochState(std::move(basis), RVector<Scalar>::Zero(n));
  }

  Index dimension() const noexcept { return basis_->dimension(); }
  const RVector<Scalar>& rho() const noexcept { return rho_; }
  const BasisPtr<Scalar>& basis() const noexcept { return basis_; }

 private:
  BasisPtr<Scalar> basis_;
  RVector<Scalar> rho_;
};

/// Hermitian, unit-trace M x M matrix. Positivity is checked by the
/// constructing operations, not by the type.
template <typename Scalar>
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix<Scalar> m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionError("density matrix must be square");
  }
  Index dimension() const noexcept { return m_.rows(); }
  const CMatrix<Scalar>& matrix() const noexcept { return m_; }
  Complex<Scalar> operator()(Index a, Index b) const { return m_(a, b); }

 private:
  CMatrix<Scalar> m_;
};

/// Unit-norm M-component wave function.
template <typename Scalar>
class WaveFunction {
 public:
  explicit WaveFunction(CVector<Scalar> psi) : psi_(std::move(psi)) {
    const Scalar dev = std::abs(psi_.squaredNorm() - Scalar(1));
    if (dev > Scalar(tol::kNorm))
      throw InvalidStateError("wave function is not normalized", static_cast<double>(dev));
  }
  Index dimension() const noexcept { return psi_.size(); }
  const CVector<Scalar>& vector() const noexcept { return psi_; }
  Complex<Scalar> operator()(Index a) const { return psi_(a); }

  /// Basis vector psi-hat_m (0-based m).
  static WaveFunction unit(Index dimension, Index m) {
    CVector<Scalar> v = CVector<Scalar>::Zero(dimension);
    v(m) = 1;
    return WaveFunction(std::move(v));
  }

 private:
  CVector<Scalar> psi_;
};

/// (1 + sum_k rho_k L_k) / M without any positivity check.
template <typename Scalar>
CMatrix<Scalar> assemble_density(const BlochState<Scalar>& s) {
  const auto& basis = *s.basis();
  const Index M = basis.dimension();
  CMatrix<Scalar> m = CMatrix<Scalar>::Identity(M, M);
  for (Index k = 0; k < basis.size(); ++k)
    if (s.rho()(k) != Scalar(0)) m += s.rho()(k) * basis[k];
  return m / Scalar(M);
}

template <typename Scalar>
Scalar min_eigenvalue(const CMatrix<Scalar>& m) {
  return hermitian_eigenvalues<Scalar>(m).minCoeff();
}

template <typename Scalar>
DensityMatrix<Scalar> density_from_bloch(const BlochState<Scalar>& s) {
  CMatrix<Scalar> m = assemble_density(s);
  const Scalar lowest = min_eigenvalue<Scalar>(m);
  if (lowest < -Scalar(tol::kPositivity))
    throw InvalidStateError("Bloch vector does not give a positive density matrix",
                            static_cast<double>(lowest));
  return DensityMatrix<Scalar>(std::move(m));
}

/// rho_k = tr(rho L_k), using tr(L_k L_l) = M delta_kl.
template <typename Scalar>
BlochState<Scalar> bloch_from_density(const DensityMatrix<Scalar>& rho, BasisPtr<Scalar> basis) {
  if (rho.dimension() != basis->dimension())
    throw DimensionError("density matrix and basis dimensions differ");
  RVector<Scalar> coeffs(basis->size());
  for (Index k = 0; k < basis->size(); ++k)
    coeffs(k) = trace_product<Scalar>(rho.matrix(), (*basis)[k]).real();
  return BlochState<Scalar>(std::move(basis), std::move(coeffs));
}

template <typename Scalar>
Scalar purity(const BlochState<Scalar>& s) {
  return s.rho().squaredNorm();
}

/// tr[(rho^2 - rho)^2]; vanishes exactly for pure states.
template <typename Scalar>
Scalar copurity(const CMatrix<Scalar>& rho) {
  const CMatrix<Scalar> x = rho * rho - rho;
  return trace_product<Scalar>(x, x).real();
}

template <typename Scalar>
Scalar copurity(const DensityMatrix<Scalar>& rho) {
  return copurity<Scalar>(rho.matrix());
}

/// Wave function psi with psi psi^dagger = rho for a pure density matrix.
template <typename Scalar>
WaveFunction<Scalar> wavefunction_from_pure(const DensityMatrix<Scalar>& rho) {
  const Scalar c = copurity(rho);
  if (c > Scalar(tol::kPureCopurity))
    throw InvalidStateError("density matrix is not pure", static_cast<double>(c));
  // For rho = psi psi^dagger, column j divided by sqrt(rho_jj) is psi up to phase.
  Index pivot = 0;
  rho.matrix().diagonal().real().maxCoeff(&pivot);
  CVector<Scalar> psi = rho.matrix().col(pivot) / std::sqrt(rho.matrix()(pivot, pivot).real());
  psi.normalize();
  return WaveFunction<Scalar>(fix_phase<Scalar>(psi));
}

template <typename Scalar>
DensityMatrix<Scalar> density_from_wavefunction(const WaveFunction<Scalar>& psi) {
  return DensityMatrix<Scalar>(psi.vector() * psi.vector().adjoint());
}

struct StateReport {
  double purity = 0;
  double purity_bound = 0;  // M - 1
  bool purity_ok = false;
  double min_eigenvalue = 0;
  bool positive = false;
  double max_abs_component = 0;
  bool valid() const noexcept { return purity_ok && positive; }
};

/// Purity bound P <= M - 1 and positivity of the reconstructed density matrix.
template <typename Scalar>
StateReport validate_quantum_state(const BlochState<Scalar>& s) {
  StateReport r;
  r.purity = static_cast<double>(purity(s));
  r.purity_bound = static_cast<double>(s.dimension() - 1);
  r.purity_ok = r.purity <= r.purity_bound + tol::kAlgebra;
  r.min_eigenvalue = static_cast<double>(min_eigenvalue<Scalar>(assemble_density(s)));
  r.positive = r.min_eigenvalue >= -tol::kPositivity;
  r.max_abs_component = s.rho().size() ? static_cast<double>(s.rho().cwiseAbs().maxCoeff()) : 0.0;
  return r;
}

/// tr(rho A) for a matrix operator.
template <typename Scalar>
Scalar expectation(const DensityMatrix<Scalar>& rho, const CMatrix<Scalar>& op) {
  return trace_product<Scalar>(rho.matrix(), op).real();
}

}  // namespace qemerge

#endif  // QEMERGE_QUANTUM_STATE_HPP_
