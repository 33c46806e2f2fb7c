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

#ifndef QEMERGE_CLASSICAL_ENSEMBLE_HPP_
#define QEMERGE_CLASSICAL_ENSEMBLE_HPP_

#include <array>
#include <cstddef>
#include <future>
#include <utility>
#include <vector>

#include "qemerge/core.hpp"
#include "qemerge/observables.hpp"
#include "qemerge/quantum_state.hpp"

namespace qemerge {

inline constexpr std::size_t kMaxClassicalStates = 10'000'000;

/// Values A_tau of a classical observable, one per classical state.
template <typename Scalar>
struct ClassicalObservable {
  std::vector<Scalar> values;

  std::size_t size() const noexcept { return values.size(); }
  Scalar operator[](std::size_t tau) const { return values[tau]; }

  static ClassicalObservable constant(std::size_t states, Scalar value) {
    return {std::vector<Scalar>(states, value)};
  }
};

/// Finite classical ensemble over the direct product of the eigenvalue-index
/// sets of its registered operators. Slot i of the label of state tau is the
/// eigenvalue index a_i(tau); the first slot varies slowest.
template <typename Scalar>
class ClassicalEnsemble {
 public:
  using Label = std::vector<std::size_t>;

  std::size_t state_count() const noexcept { return probabilities_.size(); }
  std::size_t slot_count() const noexcept { return radices_.size(); }
  const std::vector<std::size_t>& radices() const noexcept { return radices_; }
  const std::vector<Scalar>& probabilities() const noexcept { return probabilities_; }
  const std::vector<QuantumOperator<Scalar>>& operators() const noexcept { return operators_; }
  const std::vector<ProbabilisticObservable<Scalar>>& slot_observables() const noexcept { return slot_obs_; }
  const ClassicalObservable<Scalar>& registered(std::size_t slot) const { return registered_.at(slot); }
  const std::vector<ClassicalObservable<Scalar>>& registered_observables() const noexcept { return registered_; }

  Label label(std::size_t tau) const {
    Label out(radices_.size());
    for (std::size_t i = radices_.size(); i-- > 0;) {
      out[i] = tau % radices_[i];
      tau /= radices_[i];
    }
    return out;
  }

  std::size_t state_index(const Label& label) const {
    std::size_t tau = 0;
    for (std::size_t i = 0; i < radices_.size(); ++i) tau = tau * radices_[i] + label.at(i);
    return tau;
  }

  /// Copy with a different probability distribution; normalization is checked.
  ClassicalEnsemble with_probabilities(std::vector<Scalar> p) const {
    if (p.size() != state_count()) throw DimensionError("probability table size differs from state count");
    Scalar total = 0;
    for (Scalar x : p) {
      if (x < -Scalar(tol::kExact)) throw InvalidStateError("negative classical probability", static_cast<double>(x));
      total += x;
    }
    if (std::abs(total - Scalar(1)) > Scalar(tol::kExact))
      throw InvalidStateError("classical probabilities do not sum to one", static_cast<double>(total));
    ClassicalEnsemble out = *this;
    out.probabilities_ = std::move(p);
    return out;
  }

 private:
  template <typename S>
  friend ClassicalEnsemble<S> build_product_ensemble(const std::vector<QuantumOperator<S>>&, S);

  std::vector<std::size_t> radices_;
  std::vector<Scalar> probabilities_;
  std::vector<QuantumOperator<Scalar>> operators_;
  std::vector<ProbabilisticObservable<Scalar>> slot_obs_;
  std::vector<ClassicalObservable<Scalar>> registered_;
};

/// tr[(A - B)^2] >= epsilon.
template <typename Scalar>
bool independence_check(const QuantumOperator<Scalar>& a, const QuantumOperator<Scalar>& b, Scalar epsilon) {
  if (a.dimension() != b.dimension()) throw DimensionError("operators act on different dimensions");
  const CMatrix<Scalar> diff = a.matrix() - b.matrix();
  return trace_product<Scalar>(diff, diff).real() >= epsilon;
}

template <typename Scalar>
Scalar default_independence_epsilon(Index dimension) {
  return Scalar(1e-6) * Scalar(dimension);
}

class DependenceError : public Error {
 public:
  using Error::Error;
};

/// Direct-product ensemble: one slot per operator, uniform probabilities.
template <typename Scalar>
ClassicalEnsemble<Scalar> build_product_ensemble(const std::vector<QuantumOperator<Scalar>>& operators,
                                                 Scalar epsilon) {
  if (operators.empty()) throw DimensionError("ensemble needs at least one operator");
  for (std::size_t i = 0; i < operators.size(); ++i)
    for (std::size_t j = i + 1; j < operators.size(); ++j)
      if (!independence_check(operators[i], operators[j], epsilon))
        throw DependenceError("operators " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                              " are not independent");

  ClassicalEnsemble<Scalar> ens;
  std::size_t states = 1;
  for (const auto& op : operators) {
    ens.slot_obs_.push_back(quantum_observable_from_operator(op));
    const std::size_t m = static_cast<std::size_t>(ens.slot_obs_.back().outcomes());
    if (states > kMaxClassicalStates / m)
      throw CapExceededError("classical state space exceeds " + std::to_string(kMaxClassicalStates) + " states");
    states *= m;
    ens.radices_.push_back(m);
  }
  ens.operators_ = operators;
  ens.probabilities_.assign(states, Scalar(1) / Scalar(states));

  // Slot i repeats each value `inner` times, cycling `outer` times.
  std::size_t inner = states;
  for (std::size_t i = 0; i < operators.size(); ++i) {
    inner /= ens.radices_[i];
    const auto& gamma = ens.slot_obs_[i].gamma();
    ClassicalObservable<Scalar> obs{std::vector<Scalar>(states)};
    for (std::size_t tau = 0; tau < states; ++tau)
      obs.values[tau] = gamma(static_cast<Index>((tau / inner) % ens.radices_[i]));
    ens.registered_.push_back(std::move(obs));
  }
  return ens;
}

/// p_tau = prod_i w^(i)_{a_i(tau)}: the product of quantum marginals.
template <typename Scalar>
ClassicalEnsemble<Scalar> assign_product_probabilities(const ClassicalEnsemble<Scalar>& ens,
                                                       const BlochState<Scalar>& s) {
  std::vector<RVector<Scalar>> marginals;
  for (const auto& obs : ens.slot_observables()) marginals.push_back(probabilities_in_state(obs, s));
  std::vector<Scalar> p(ens.state_count(), Scalar(1));
  std::size_t inner = ens.state_count();
  for (std::size_t i = 0; i < ens.slot_count(); ++i) {
    inner /= ens.radices()[i];
    for (std::size_t tau = 0; tau < p.size(); ++tau)
      p[tau] *= marginals[i](static_cast<Index>((tau / inner) % ens.radices()[i]));
  }
  // Renormalize away rounding from the clamped marginals.
  Scalar total = 0;
  for (Scalar x : p) total += x;
  for (Scalar& x : p) x /= total;
  return ens.with_probabilities(std::move(p));
}

/// Marginal of slot `slot` under the ensemble's probabilities.
template <typename Scalar>
std::vector<Scalar> slot_marginal(const ClassicalEnsemble<Scalar>& ens, std::size_t slot) {
  std::vector<Scalar> w(ens.radices().at(slot), Scalar(0));
  for (std::size_t tau = 0; tau < ens.state_count(); ++tau) w[ens.label(tau)[slot]] += ens.probabilities()[tau];
  return w;
}

/// Accepts a user joint table, provided every slot marginal matches the
/// quantum outcome probabilities of its operator in state `s`.
template <typename Scalar>
ClassicalEnsemble<Scalar> assign_correlated_probabilities(const ClassicalEnsemble<Scalar>& ens,
                                                          const BlochState<Scalar>& s,
                                                          std::vector<Scalar> joint) {
  ClassicalEnsemble<Scalar> out = ens.with_probabilities(std::move(joint));
  for (std::size_t i = 0; i < ens.slot_count(); ++i) {
    const RVector<Scalar> w = probabilities_in_state(ens.slot_observables()[i], s);
    const auto got = slot_marginal(out, i);
    for (std::size_t a = 0; a < got.size(); ++a)
      if (std::abs(got[a] - w(static_cast<Index>(a))) > Scalar(tol::kExact))
        throw InvalidStateError("joint table does not reproduce the quantum marginal of slot " +
                                    std::to_string(i + 1),
                                static_cast<double>(got[a] - w(static_cast<Index>(a))));
  }
  return out;
}

namespace detail {
inline constexpr std::size_t kSumBlock = 1 << 16;
}

/// sum_tau p_tau A_tau. Partial sums are taken over fixed blocks and combined
/// in block order, so the result does not depend on `threads`.
template <typename Scalar>
Scalar expectation(const ClassicalEnsemble<Scalar>& ens, const ClassicalObservable<Scalar>& a,
                   unsigned threads = 1) {
  const auto& p = ens.probabilities();
  if (a.size() != p.size()) throw DimensionError("observable is not defined on this ensemble");
  const std::size_t blocks = (p.size() + detail::kSumBlock - 1) / detail::kSumBlock;
  std::vector<Scalar> partial(blocks, Scalar(0));
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t b = first; b < blocks; b += stride) {
      const std::size_t end = std::min(p.size(), (b + 1) * detail::kSumBlock);
      Scalar sum = 0;
      for (std::size_t tau = b * detail::kSumBlock; tau < end; ++tau) sum += p[tau] * a.values[tau];
      partial[b] = sum;
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(blocks, 1))));
  if (threads == 1) {
    run(0, 1);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned t = 0; t < threads; ++t) jobs.push_back(std::async(std::launch::async, run, t, threads));
    for (auto& j : jobs) j.get();
  }
  Scalar total = 0;
  for (Scalar x : partial) total += x;
  return total;
}

/// Pointwise product (A.B)_tau = A_tau B_tau.
template <typename Scalar>
ClassicalObservable<Scalar> classical_product(const ClassicalObservable<Scalar>& a,
                                              const ClassicalObservable<Scalar>& b) {
  if (a.size() != b.size()) throw DimensionError("observables live on different ensembles");
  ClassicalObservable<Scalar> out{std::vector<Scalar>(a.size())};
  for (std::size_t tau = 0; tau < a.size(); ++tau) out.values[tau] = a.values[tau] * b.values[tau];
  return out;
}

template <typename Scalar>
Scalar classical_correlation(const ClassicalEnsemble<Scalar>& ens, const ClassicalObservable<Scalar>& a,
                             const ClassicalObservable<Scalar>& b, unsigned threads = 1) {
  return expectation(ens, classical_product(a, b), threads);
}

/// 2x2 table indexed [s][s'] with index 0 for +1 and 1 for -1.
template <typename Scalar>
using OutcomeTable = std::array<std::array<Scalar, 2>, 2>;

/// p_{ss'} = (1 + s<A> + s'<B> + ss'<A.B>)/4 for two-level classical observables.
template <typename Scalar>
OutcomeTable<Scalar> joint_value_probabilities(const ClassicalEnsemble<Scalar>& ens,
                                               const ClassicalObservable<Scalar>& a,
                                               const ClassicalObservable<Scalar>& b) {
  for (const auto* obs : {&a, &b})
    for (Scalar v : obs->values)
      if (std::abs(std::abs(v) - Scalar(1)) > Scalar(tol::kExact))
        throw NotTwoLevelError("joint value probabilities need two-level observables");
  const Scalar ea = expectation(ens, a), eb = expectation(ens, b), eab = classical_correlation(ens, a, b);
  OutcomeTable<Scalar> t{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Scalar s = i == 0 ? 1 : -1, sp = j == 0 ? 1 : -1;
      t[i][j] = (Scalar(1) + s * ea + sp * eb + s * sp * eab) / Scalar(4);
    }
  return t;
}

}  // namespace qemerge

#endif  // QEMERGE_CLASSICAL_ENSEMBLE_HPP_
