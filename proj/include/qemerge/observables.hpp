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

#ifndef QEMERGE_OBSERVABLES_HPP_
#define QEMERGE_OBSERVABLES_HPP_

#include <utility>
#include <vector>

#include "qemerge/core.hpp"
#include "qemerge/generator_basis.hpp"
#include "qemerge/quantum_state.hpp"

namespace qemerge {

/// Hermitian operator A = e_0 + sum_k e_k L_k, kept in both forms.
template <typename Scalar>
class QuantumOperator {
 public:
  QuantumOperator(BasisPtr<Scalar> basis, CMatrix<Scalar> matrix, Scalar e0, RVector<Scalar> e)
      : basis_(std::move(basis)), matrix_(std::move(matrix)), e0_(e0), e_(std::move(e)) {}

  Index dimension() const noexcept { return matrix_.rows(); }
  const CMatrix<Scalar>& matrix() const noexcept { return matrix_; }
  Scalar e0() const noexcept { return e0_; }
  const RVector<Scalar>& e() const noexcept { return e_; }
  const BasisPtr<Scalar>& basis() const noexcept { return basis_; }

 private:
  BasisPtr<Scalar> basis_;
  CMatrix<Scalar> matrix_;
  Scalar e0_;
  RVector<Scalar> e_;
};

template <typename Scalar>
QuantumOperator<Scalar> operator_from_coefficients(Scalar e0, const RVector<Scalar>& e,
                                                   BasisPtr<Scalar> basis) {
  if (e.size() != basis->size())
    throw DimensionError("coefficient vector length must equal M^2 - 1");
  const Index M = basis->dimension();
  CMatrix<Scalar> m = CMatrix<Scalar>::Identity(M, M) * e0;
  for (Index k = 0; k < basis->size(); ++k)
    if (e(k) != Scalar(0)) m += e(k) * (*basis)[k];
  return QuantumOperator<Scalar>(std::move(basis), std::move(m), e0, e);
}

/// Expands a hermitian matrix: e_0 = tr(A)/M, e_k = tr(A L_k)/M.
template <typename Scalar>
QuantumOperator<Scalar> operator_from_matrix(const CMatrix<Scalar>& a, BasisPtr<Scalar> basis) {
  const Index M = basis->dimension();
  if (a.rows() != M || a.cols() != M) throw DimensionError("operator dimension differs from basis");
  const Scalar herm = hermiticity_defect<Scalar>(a);
  if (herm > Scalar(tol::kExact) * std::max(Scalar(1), max_abs(a)))
    throw Error("operator is not hermitian (defect " + std::to_string(static_cast<double>(herm)) + ")");
  RVector<Scalar> e(basis->size());
  for (Index k = 0; k < basis->size(); ++k) e(k) = trace_product<Scalar>(a, (*basis)[k]).real() / Scalar(M);
  const Scalar e0 = a.trace().real() / Scalar(M);
  return QuantumOperator<Scalar>(std::move(basis), (a + a.adjoint()) * Scalar(0.5), e0, std::move(e));
}

/// Generator L_k as an operator (0-based k).
template <typename Scalar>
QuantumOperator<Scalar> generator_operator(BasisPtr<Scalar> basis, Index k) {
  RVector<Scalar> e = RVector<Scalar>::Zero(basis->size());
  e(k) = 1;
  return operator_from_coefficients<Scalar>(Scalar(0), e, std::move(basis));
}

template <typename Scalar>
QuantumOperator<Scalar> operator+(const QuantumOperator<Scalar>& a, const QuantumOperator<Scalar>& b) {
  return operator_from_coefficients<Scalar>(a.e0() + b.e0(), a.e() + b.e(), a.basis());
}

template <typename Scalar>
QuantumOperator<Scalar> operator*(Scalar lambda, const QuantumOperator<Scalar>& a) {
  return operator_from_coefficients<Scalar>(lambda * a.e0(), lambda * a.e(), a.basis());
}

/// <A> = e_0 + e_k rho_k.
template <typename Scalar>
Scalar expectation(const BlochState<Scalar>& s, const QuantumOperator<Scalar>& a) {
  if (s.rho().size() != a.e().size()) throw DimensionError("state and operator dimensions differ");
  return a.e0() + a.e().dot(s.rho());
}

/// Spectrum gamma_a with probabilities w_a = c_a . rho + c_a0 linear in the state.
template <typename Scalar>
class ProbabilisticObservable {
 public:
  ProbabilisticObservable(RVector<Scalar> gamma, RMatrix<Scalar> c, RVector<Scalar> c0)
      : gamma_(std::move(gamma)), c_(std::move(c)), c0_(std::move(c0)) {
    if (c_.rows() != gamma_.size() || c0_.size() != gamma_.size())
      throw DimensionError("observable coefficient shapes do not match its spectrum");
  }
  Index outcomes() const noexcept { return gamma_.size(); }
  const RVector<Scalar>& gamma() const noexcept { return gamma_; }
  const RMatrix<Scalar>& c() const noexcept { return c_; }
  const RVector<Scalar>& c0() const noexcept { return c0_; }

  /// Largest violation of sum_a c_ak = 0 and sum_a c_a0 = 1.
  Scalar normalization_defect() const {
    Scalar dev = std::abs(c0_.sum() - Scalar(1));
    if (c_.cols() > 0) dev = std::max(dev, c_.colwise().sum().cwiseAbs().maxCoeff());
    return dev;
  }

 private:
  RVector<Scalar> gamma_;
  RMatrix<Scalar> c_;
  RVector<Scalar> c0_;
};

/// Quantum observable of an operator. Distinct eigenvalues, descending, with
/// c_ak = (v^dagger L_k v)/M and c_a0 = 1/M summed over each eigenspace.
template <typename Scalar>
ProbabilisticObservable<Scalar> quantum_observable_from_operator(const QuantumOperator<Scalar>& a) {
  const auto& basis = *a.basis();
  const Index M = basis.dimension();
  const Index n = basis.size();
  const Scalar herm = hermiticity_defect<Scalar>(a.matrix());
  if (herm > Scalar(tol::kExact) * std::max(Scalar(1), max_abs(a.matrix())))
    throw Error("operator is not hermitian");

  auto eig = hermitian_eigen<Scalar>(a.matrix());
  // Descending order.
  RVector<Scalar> values = eig.values.reverse();
  CMatrix<Scalar> vectors = eig.vectors.rowwise().reverse();

  const Scalar scale = std::max(values(0) - values(M - 1), values.cwiseAbs().maxCoeff());
  const auto starts = cluster_sorted<Scalar>(-values, Scalar(tol::kDegeneracy) * scale);
  const Index groups = static_cast<Index>(starts.size()) - 1;

  RVector<Scalar> gamma(groups);
  RMatrix<Scalar> c = RMatrix<Scalar>::Zero(groups, n);
  RVector<Scalar> c0(groups);
  for (Index g = 0; g < groups; ++g) {
    const Index begin = starts[g], end = starts[g + 1];
    gamma(g) = values.segment(begin, end - begin).mean();
    c0(g) = Scalar(end - begin) / Scalar(M);
    for (Index j = begin; j < end; ++j) {
      const CVector<Scalar> v = vectors.col(j);
      for (Index k = 0; k < n; ++k) c(g, k) += (v.adjoint() * basis[k] * v)(0).real() / Scalar(M);
    }
  }
  return ProbabilisticObservable<Scalar>(std::move(gamma), std::move(c), std::move(c0));
}

/// Operator image of any probabilistic observable: e_0 = sum_a gamma_a c_a0,
/// e_k = sum_a gamma_a c_ak. Not injective.
template <typename Scalar>
QuantumOperator<Scalar> operator_from_observable(const ProbabilisticObservable<Scalar>& obs,
                                                 BasisPtr<Scalar> basis) {
  if (obs.c().cols() != basis->size()) throw DimensionError("observable and basis dimensions differ");
  const Scalar e0 = obs.gamma().dot(obs.c0());
  const RVector<Scalar> e = obs.c().transpose() * obs.gamma();
  return operator_from_coefficients<Scalar>(e0, e, std::move(basis));
}

/// Outcome probabilities w_a, clamped to [0, 1] after the tolerance check.
template <typename Scalar>
RVector<Scalar> probabilities_in_state(const ProbabilisticObservable<Scalar>& obs,
                                       const BlochState<Scalar>& s) {
  if (obs.c().cols() != s.rho().size()) throw DimensionError("state and observable dimensions differ");
  RVector<Scalar> w = obs.c() * s.rho() + obs.c0();
  for (Index a = 0; a < w.size(); ++a) {
    if (w(a) < -Scalar(tol::kPositivity) || w(a) > Scalar(1) + Scalar(tol::kPositivity))
      throw InvalidStateError("outcome probability outside [0, 1]", static_cast<double>(w(a)));
    w(a) = std::clamp(w(a), Scalar(0), Scalar(1));
  }
  return w;
}

/// <A^p> = sum_a w_a gamma_a^p.
template <typename Scalar>
Scalar moment(const ProbabilisticObservable<Scalar>& obs, const BlochState<Scalar>& s, int p) {
  const RVector<Scalar> w = probabilities_in_state(obs, s);
  Scalar sum = 0;
  for (Index a = 0; a < w.size(); ++a) sum += w(a) * std::pow(obs.gamma()(a), p);
  return sum;
}

/// Two-level observable with state-independent probabilities 1/2. Its
/// operator image is zero while its square is one.
template <typename Scalar>
ProbabilisticObservable<Scalar> random_observable(const GeneratorBasis<Scalar>& basis) {
  RVector<Scalar> gamma(2);
  gamma << 1, -1;
  RVector<Scalar> c0(2);
  c0 << Scalar(0.5), Scalar(0.5);
  return ProbabilisticObservable<Scalar>(gamma, RMatrix<Scalar>::Zero(2, basis.size()), c0);
}

template <typename Scalar>
struct SpectrumComparison {
  std::vector<Scalar> classical;  // distinct lambda_A gamma_a + lambda_B gamma_b
  Index classical_combinations = 0;
  std::vector<Scalar> operator_spectrum;  // distinct eigenvalues of lambda_A A + lambda_B B
  bool match = false;
};

/// Compares the pointwise spectrum of lambda_A A + lambda_B B with the
/// eigenvalues of the combined operator, as sets.
template <typename Scalar>
SpectrumComparison<Scalar> combination_spectrum_check(const ProbabilisticObservable<Scalar>& a,
                                                      const ProbabilisticObservable<Scalar>& b,
                                                      Scalar lambda_a, Scalar lambda_b,
                                                      BasisPtr<Scalar> basis) {
  if (a.c().cols() != b.c().cols()) throw DimensionError("observables live on different systems");
  const Scalar threshold = Scalar(tol::kDegeneracy);
  SpectrumComparison<Scalar> out;
  std::vector<Scalar> combos;
  for (Index i = 0; i < a.outcomes(); ++i)
    for (Index j = 0; j < b.outcomes(); ++j) combos.push_back(lambda_a * a.gamma()(i) + lambda_b * b.gamma()(j));
  out.classical_combinations = static_cast<Index>(combos.size());
  out.classical = distinct_descending(combos, threshold);

  const CMatrix<Scalar> combined = lambda_a * operator_from_observable(a, basis).matrix() +
                                   lambda_b * operator_from_observable(b, basis).matrix();
  const RVector<Scalar> ev = hermitian_eigenvalues<Scalar>(combined);
  out.operator_spectrum = distinct_descending(std::vector<Scalar>(ev.data(), ev.data() + ev.size()), threshold);

  out.match = out.classical.size() == out.operator_spectrum.size();
  for (std::size_t i = 0; out.match && i < out.classical.size(); ++i)
    out.match = std::abs(out.classical[i] - out.operator_spectrum[i]) <= threshold;
  return out;
}

template <typename Scalar>
bool is_commuting_pair(const QuantumOperator<Scalar>& a, const QuantumOperator<Scalar>& b) {
  if (a.dimension() != b.dimension()) throw DimensionError("operators act on different dimensions");
  return max_abs(commutator<Scalar>(a.matrix(), b.matrix())) <= Scalar(tol::kAlgebra);
}

class NotQuantumObservableError : public Error {
 public:
  using Error::Error;
};

/// Operator of the classical product of two commuting observables: {A, B}/2.
template <typename Scalar>
QuantumOperator<Scalar> classical_product_operator(const QuantumOperator<Scalar>& a,
                                                   const QuantumOperator<Scalar>& b) {
  if (!is_commuting_pair(a, b))
    throw NotQuantumObservableError("classical product is not a quantum observable here: operators do not commute");
  return operator_from_matrix<Scalar>(anticommutator<Scalar>(a.matrix(), b.matrix()) * Scalar(0.5), a.basis());
}

}  // namespace qemerge

#endif  // QEMERGE_OBSERVABLES_HPP_
