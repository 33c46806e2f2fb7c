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

#ifndef QEMERGE_MEASUREMENT_HPP_
#define QEMERGE_MEASUREMENT_HPP_

#include <functional>
#include <optional>
#include <utility>

#include "qemerge/classical_ensemble.hpp"
#include "qemerge/core.hpp"
#include "qemerge/generator_basis.hpp"
#include "qemerge/observables.hpp"
#include "qemerge/quantum_state.hpp"

namespace qemerge {

/// How much of the pre-measurement state survives a two-level measurement.
///  - MinimallyDestructive projects onto the measured eigenspace; pure states stay pure.
///  - MaximallyDestructive keeps only the measured value: the normalized
///    eigenspace projector, (1 +- A)/M for traceless A.
enum class ReductionMode { MinimallyDestructive, MaximallyDestructive };

inline const char* to_string(ReductionMode mode) {
  return mode == ReductionMode::MinimallyDestructive ? "minimal" : "maximal";
}

template <typename Scalar>
struct MeasurementOutcome {
  int sign = 1;
  Scalar probability = 0;
  std::optional<BlochState<Scalar>> post_state;  // empty for unreachable branches
};

template <typename Scalar>
void require_two_level(const QuantumOperator<Scalar>& a) {
  const Index M = a.dimension();
  const Scalar dev = max_abs((a.matrix() * a.matrix() - CMatrix<Scalar>::Identity(M, M)).eval());
  if (dev > Scalar(tol::kAlgebra))
    throw NotTwoLevelError("operator does not square to one (defect " + std::to_string(static_cast<double>(dev)) + ")");
}

/// w^A_{+-} = (1 +- <A>)/2.
template <typename Scalar>
Scalar branch_probability(const BlochState<Scalar>& s, const QuantumOperator<Scalar>& a, int sign) {
  return (Scalar(1) + Scalar(sign) * expectation(s, a)) / Scalar(2);
}

namespace detail {

template <typename Scalar>
CMatrix<Scalar> reduced_density(const CMatrix<Scalar>& rho, const QuantumOperator<Scalar>& a, int sign,
                                ReductionMode mode, Scalar branch) {
  const Index M = a.dimension();
  const CMatrix<Scalar> proj =
      (CMatrix<Scalar>::Identity(M, M) + Scalar(sign) * a.matrix()) * Scalar(0.5);
  if (mode == ReductionMode::MinimallyDestructive) {
    // (1 +- A) rho (1 +- A) / (2 (1 +- <A>)) = P rho P / w
    CMatrix<Scalar> out = proj * rho * proj / branch;
    return (out + out.adjoint()) * Scalar(0.5);
  }
  const Scalar rank = proj.trace().real();
  return proj / rank;
}

}  // namespace detail

/// State after measuring the two-level operator A with outcome `sign`.
template <typename Scalar>
BlochState<Scalar> reduce_state(const BlochState<Scalar>& s, const QuantumOperator<Scalar>& a, int sign,
                                ReductionMode mode) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("measurement sign must be +1 or -1");
  require_two_level(a);
  const Scalar w = branch_probability(s, a, sign);
  if (w < Scalar(tol::kBranch))
    throw UnreachableBranchError("measurement branch has vanishing probability", static_cast<double>(w));
  const CMatrix<Scalar> rho = assemble_density(s);
  return bloch_from_density(DensityMatrix<Scalar>(detail::reduced_density(rho, a, sign, mode, w)), s.basis());
}

template <typename Scalar>
MeasurementOutcome<Scalar> measure(const BlochState<Scalar>& s, const QuantumOperator<Scalar>& a, int sign,
                                   ReductionMode mode) {
  require_two_level(a);
  MeasurementOutcome<Scalar> out;
  out.sign = sign;
  out.probability = branch_probability(s, a, sign);
  if (out.probability >= Scalar(tol::kBranch)) out.post_state = reduce_state(s, a, sign, mode);
  return out;
}

/// (w^B_+, w^B_-) after A was measured with outcome `first_sign`.
template <typename Scalar>
std::pair<Scalar, Scalar> conditional_probability(const BlochState<Scalar>& s, const QuantumOperator<Scalar>& a,
                                                  const QuantumOperator<Scalar>& b, int first_sign,
                                                  ReductionMode mode) {
  require_two_level(b);
  const BlochState<Scalar> after = reduce_state(s, a, first_sign, mode);
  const Scalar eb = expectation(after, b);
  return {(Scalar(1) + eb) / Scalar(2), (Scalar(1) - eb) / Scalar(2)};
}

/// <BA>_m = tr(B rho_{A+}) w^A_+ - tr(B rho_{A-}) w^A_-. Unreachable branches
/// carry zero weight.
template <typename Scalar>
Scalar measurement_correlation(const BlochState<Scalar>& s, const QuantumOperator<Scalar>& a,
                               const QuantumOperator<Scalar>& b, ReductionMode mode) {
  require_two_level(a);
  require_two_level(b);
  Scalar total = 0;
  for (int sign : {1, -1}) {
    const Scalar w = branch_probability(s, a, sign);
    if (w < Scalar(tol::kBranch)) continue;
    total += Scalar(sign) * w * expectation(reduce_state(s, a, sign, mode), b);
  }
  return total;
}

/// Quantum correlation tr({A, B} rho)/2.
template <typename Scalar>
Scalar anticommutator_correlation(const BlochState<Scalar>& s, const QuantumOperator<Scalar>& a,
                                  const QuantumOperator<Scalar>& b) {
  const CMatrix<Scalar> rho = assemble_density(s);
  return trace_product<Scalar>(anticommutator<Scalar>(a.matrix(), b.matrix()), rho).real() / Scalar(2);
}

namespace detail {

template <typename Scalar>
OutcomeTable<Scalar> outcome_table(Scalar ea, Scalar eb, Scalar eab) {
  OutcomeTable<Scalar> t{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Scalar s = i == 0 ? 1 : -1, sp = j == 0 ? 1 : -1;
      t[i][j] = (Scalar(1) + s * ea + sp * eb + s * sp * eab) / Scalar(4);
    }
  return t;
}

template <typename Scalar>
void require_nonnegative(const OutcomeTable<Scalar>& t) {
  for (const auto& row : t)
    for (Scalar x : row)
      if (x < -Scalar(tol::kPositivity))
        throw InvalidStateError("joint outcome probability is negative: not a quantum state", static_cast<double>(x));
}

}  // namespace detail

/// w_{ss'} = (1 + s<A> + s'<B> + ss'<AB>_m)/4 using the quantum correlation.
template <typename Scalar>
OutcomeTable<Scalar> joint_outcome_probabilities(const BlochState<Scalar>& s, const QuantumOperator<Scalar>& a,
                                                 const QuantumOperator<Scalar>& b) {
  require_two_level(a);
  require_two_level(b);
  auto t = detail::outcome_table(expectation(s, a), expectation(s, b), anticommutator_correlation(s, a, b));
  detail::require_nonnegative(t);
  return t;
}

/// Same table evaluated directly in Bloch space through d_klm:
/// <AB>_m = a0 b0 + a.b + a0 (b.rho) + b0 (a.rho) + d_mlk a_m b_l rho_k.
template <typename Scalar>
OutcomeTable<Scalar> joint_outcome_probabilities_bloch(const BlochState<Scalar>& s,
                                                       const QuantumOperator<Scalar>& a,
                                                       const QuantumOperator<Scalar>& b,
                                                       const StructureConstants<Scalar>& sc) {
  const auto& rho = s.rho();
  const auto& ea = a.e();
  const auto& eb = b.e();
  Scalar quad = 0;
  for (Index m = 0; m < ea.size(); ++m) {
    if (ea(m) == Scalar(0)) continue;
    for (Index l = 0; l < eb.size(); ++l) {
      if (eb(l) == Scalar(0)) continue;
      for (const auto& t : sc.terms(m, l)) quad += t.d * ea(m) * eb(l) * rho(t.m);
    }
  }
  const Scalar corr = a.e0() * b.e0() + ea.dot(eb) + a.e0() * eb.dot(rho) + b.e0() * ea.dot(rho) + quad;
  auto t = detail::outcome_table(a.e0() + ea.dot(rho), b.e0() + eb.dot(rho), corr);
  detail::require_nonnegative(t);
  return t;
}

/// Rotated spins A(theta) = cos(theta) L1 + sin(theta) L8 and
/// B(phi) = cos(phi) L2 + sin(phi) L4 of the two-qubit basis.
template <typename Scalar>
std::pair<QuantumOperator<Scalar>, QuantumOperator<Scalar>> rotated_spin_operators(const BasisPtr<Scalar>& basis,
                                                                                   Scalar theta, Scalar phi) {
  if (basis->dimension() != 4 || !basis->is_pauli())
    throw DimensionError("rotated spin operators need the built-in M = 4 basis");
  RVector<Scalar> ea = RVector<Scalar>::Zero(basis->size()), eb = ea;
  ea(0) = std::cos(theta);
  ea(7) = std::sin(theta);
  eb(1) = std::cos(phi);
  eb(3) = std::sin(phi);
  return {operator_from_coefficients<Scalar>(Scalar(0), ea, basis),
          operator_from_coefficients<Scalar>(Scalar(0), eb, basis)};
}

/// C(theta, phi) in closed form from rho_3, rho_6, rho_10, rho_12.
template <typename Scalar>
Scalar rotated_spin_correlation(const BlochState<Scalar>& s, Scalar theta, Scalar phi) {
  if (s.dimension() != 4 || !s.basis()->is_pauli())
    throw DimensionError("rotated spin correlation needs an M = 4 state in the built-in basis");
  const auto& r = s.rho();
  using std::cos;
  using std::sin;
  return cos(theta) * cos(phi) * r(2) + cos(theta) * sin(phi) * r(5) + sin(theta) * cos(phi) * r(9) +
         sin(theta) * sin(phi) * r(11);
}

/// rho_3 = epsilon rho_12 = -epsilon rho_14 = -1 in the built-in M = 4
/// basis. epsilon = +1 is the rotation invariant singlet.
template <typename Scalar>
BlochState<Scalar> maximally_anticorrelated_state(const BasisPtr<Scalar>& basis, int epsilon = 1) {
  if (basis->dimension() != 4 || !basis->is_pauli())
    throw DimensionError("the anticorrelated two-spin state needs the built-in M = 4 basis");
  if (epsilon != 1 && epsilon != -1) throw std::invalid_argument("epsilon must be +1 or -1");
  RVector<Scalar> rho = RVector<Scalar>::Zero(basis->size());
  rho(2) = -1;
  rho(11) = -Scalar(epsilon);
  rho(13) = Scalar(epsilon);
  return BlochState<Scalar>(basis, rho);
}

/// rho_3 = -1 alone: anticorrelated along the third axis, rho_12 = 0.
template <typename Scalar>
BlochState<Scalar> diagonal_anticorrelated_state(const BasisPtr<Scalar>& basis) {
  if (basis->dimension() != 4 || !basis->is_pauli())
    throw DimensionError("the anticorrelated two-spin state needs the built-in M = 4 basis");
  RVector<Scalar> rho = RVector<Scalar>::Zero(basis->size());
  rho(2) = -1;
  return BlochState<Scalar>(basis, rho);
}

template <typename Scalar>
struct BellReport {
  Scalar theta1 = 0, theta2 = 0;
  Scalar c12 = 0;  // C(theta1, theta2)
  Scalar c10 = 0;  // C(theta1, 0)
  Scalar c20 = 0;  // C(theta2, 0)
  Scalar slack = 0;
  bool violated() const noexcept { return slack < -Scalar(tol::kExact); }
};

/// slack = 1 + C(t1, t2) - |C(t1, 0) - C(t2, 0)|; negative means the
/// inequality for local deterministic theories is violated.
template <typename Scalar>
BellReport<Scalar> bell_check(const std::function<Scalar(Scalar, Scalar)>& correlation, Scalar theta1,
                              Scalar theta2) {
  BellReport<Scalar> r;
  r.theta1 = theta1;
  r.theta2 = theta2;
  r.c12 = correlation(theta1, theta2);
  r.c10 = correlation(theta1, Scalar(0));
  r.c20 = correlation(theta2, Scalar(0));
  r.slack = Scalar(1) + r.c12 - std::abs(r.c10 - r.c20);
  return r;
}

/// Conditions on the extra term X of an intermediate reduction
/// rho_{A+} = (1 + A + X)/M. No X is constructed; this only checks one.
struct IntermediateReductionReport {
  double trace_ax = 0;
  double trace_x = 0;
  double trace_x2 = 0;
  double expected_trace_x2 = 0;  // M (P - 1)
  bool ok = false;
};

template <typename Scalar>
IntermediateReductionReport check_intermediate_reduction(const QuantumOperator<Scalar>& a, const CMatrix<Scalar>& x,
                                                         Scalar purity_after) {
  IntermediateReductionReport r;
  const Index M = a.dimension();
  r.trace_ax = static_cast<double>(trace_product<Scalar>(a.matrix(), x).real());
  r.trace_x = static_cast<double>(x.trace().real());
  r.trace_x2 = static_cast<double>(trace_product<Scalar>(x, x).real());
  r.expected_trace_x2 = static_cast<double>(Scalar(M) * (purity_after - Scalar(1)));
  r.ok = std::abs(r.trace_ax) <= tol::kAlgebra && std::abs(r.trace_x) <= tol::kAlgebra &&
         std::abs(r.trace_x2 - r.expected_trace_x2) <= tol::kAlgebra;
  return r;
}

}  // namespace qemerge

#endif  // QEMERGE_MEASUREMENT_HPP_
