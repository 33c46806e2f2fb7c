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

#ifndef QEMERGE_BIT_CHAINS_HPP_
#define QEMERGE_BIT_CHAINS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qemerge/classical_ensemble.hpp"
#include "qemerge/core.hpp"
#include "qemerge/generator_basis.hpp"
#include "qemerge/quantum_state.hpp"

namespace qemerge {

class ChainError : public Error {
 public:
  enum class Kind { Empty, DimensionMismatch, NotInvolutory, NotHermitian, NonCommuting, ClosureFailure, TooManyMembers };
  ChainError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// T_i T_j = sign * T_k.
struct ChainProduct {
  std::size_t k = 0;
  int sign = 1;
};

/// Mutually commuting involutions closed under pairwise products up to sign.
template <typename Scalar>
struct BitChain {
  std::string name;
  std::vector<std::string> member_names;
  std::vector<CMatrix<Scalar>> members;
  std::map<std::pair<std::size_t, std::size_t>, ChainProduct> product_table;  // keys with i < j

  std::size_t size() const noexcept { return members.size(); }
  Index dimension() const { return members.front().rows(); }
  const ChainProduct& product(std::size_t i, std::size_t j) const {
    return product_table.at(i < j ? std::make_pair(i, j) : std::make_pair(j, i));
  }
};

namespace detail {

// +1 or -1 when a == sign * b elementwise within tol, 0 otherwise.
template <typename Scalar>
int signed_match(const CMatrix<Scalar>& a, const CMatrix<Scalar>& b, Scalar tolerance) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return 0;
  if (max_abs((a - b).eval()) <= tolerance) return 1;
  if (max_abs((a + b).eval()) <= tolerance) return -1;
  return 0;
}

}  // namespace detail

/// Verifies the chain invariants and tabulates every pairwise product.
template <typename Scalar>
BitChain<Scalar> make_chain(std::vector<CMatrix<Scalar>> operators, std::vector<std::string> names = {},
                            std::string chain_name = {}) {
  using Kind = ChainError::Kind;
  if (operators.empty()) throw ChainError(Kind::Empty, "a bit chain needs at least one member");
  if (names.empty())
    for (std::size_t i = 0; i < operators.size(); ++i) names.push_back("T" + std::to_string(i + 1));
  if (names.size() != operators.size()) throw ChainError(Kind::DimensionMismatch, "one name per member required");

  const Index M = operators.front().rows();
  const CMatrix<Scalar> id = CMatrix<Scalar>::Identity(M, M);
  const Scalar algebra = Scalar(tol::kAlgebra);
  for (std::size_t i = 0; i < operators.size(); ++i) {
    const auto& t = operators[i];
    if (t.rows() != M || t.cols() != M)
      throw ChainError(Kind::DimensionMismatch, "member " + names[i] + " has the wrong dimension");
    if (hermiticity_defect<Scalar>(t) > algebra) throw ChainError(Kind::NotHermitian, names[i] + " is not hermitian");
    if (max_abs((t * t - id).eval()) > algebra)
      throw ChainError(Kind::NotInvolutory, names[i] + " does not square to one");
  }

  for (std::size_t i = 0; i < operators.size(); ++i)
    for (std::size_t j = i + 1; j < operators.size(); ++j)
      if (max_abs((operators[i] * operators[j] - operators[j] * operators[i]).eval()) > algebra)
        throw ChainError(Kind::NonCommuting, names[i] + " and " + names[j] + " do not commute");
  if (static_cast<Index>(operators.size()) > M - 1)
    throw ChainError(Kind::TooManyMembers, "a bit chain has at most M - 1 = " + std::to_string(M - 1) + " members");

  BitChain<Scalar> chain;
  chain.name = std::move(chain_name);
  for (std::size_t i = 0; i < operators.size(); ++i) {
    for (std::size_t j = i + 1; j < operators.size(); ++j) {
      const CMatrix<Scalar> prod = operators[i] * operators[j];
      std::optional<ChainProduct> found;
      for (std::size_t k = 0; k < operators.size() && !found; ++k) {
        if (k == i || k == j) continue;
        if (int s = detail::signed_match<Scalar>(prod, operators[k], algebra)) found = ChainProduct{k, s};
      }
      if (!found)
        throw ChainError(Kind::ClosureFailure, "product " + names[i] + "." + names[j] + " is not a member up to sign");
      chain.product_table[{i, j}] = *found;
    }
  }
  chain.members = std::move(operators);
  chain.member_names = std::move(names);
  return chain;
}

/// w_{s1 s2} = (1 + s1<T1> + s2<T2> + s1 s2 <T1 T2>)/4 for a three-member
/// chain (T1, T2, T3 = +-T1 T2).
template <typename Scalar>
OutcomeTable<Scalar> chain_outcome_probabilities(const BlochState<Scalar>& s, const BitChain<Scalar>& chain) {
  if (chain.size() != 3) throw DimensionError("chain outcome probabilities need a three-member chain");
  if (chain.dimension() != s.dimension()) throw DimensionError("state and chain dimensions differ");
  const ChainProduct& p = chain.product(0, 1);
  if (p.k != 2) throw DimensionError("third member must be the product of the first two");
  const DensityMatrix<Scalar> rho(assemble_density(s));
  const Scalar t1 = expectation(rho, chain.members[0]);
  const Scalar t2 = expectation(rho, chain.members[1]);
  const Scalar t12 = Scalar(p.sign) * expectation(rho, chain.members[2]);
  OutcomeTable<Scalar> w{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Scalar s1 = i == 0 ? 1 : -1, s2 = j == 0 ? 1 : -1;
      w[i][j] = (Scalar(1) + s1 * t1 + s2 * t2 + s1 * s2 * t12) / Scalar(4);
      if (w[i][j] < -Scalar(tol::kPositivity))
        throw InvalidStateError("negative chain outcome probability: not a quantum state", static_cast<double>(w[i][j]));
    }
  return w;
}

/// Operators and member names of one of the three-qubit candidate chains.
template <typename Scalar>
struct NamedChain {
  std::string name;
  std::vector<std::string> member_names;
  std::vector<CMatrix<Scalar>> operators;
};

inline const std::vector<std::string>& three_qubit_chain_names() {
  static const std::vector<std::string> names{"C", "A", "B", "F", "G", "H", "Q-candidate", "Q-proper"};
  return names;
}

/// Three generators g1, g2, g3 of an M = 8 chain, completed to
/// (g1, g2, g3, g2 g3, g1 g3, g1 g2, g1 g2 g3).
template <typename Scalar>
NamedChain<Scalar> build_three_qubit_chain(const std::string& name) {
  auto string3 = [](int a, int b, int c) { return pauli_string_matrix<Scalar>(PauliLabel{{a, b, c}, 1}); };
  auto single = [&](int pauli_index, int site) {
    int f[3] = {0, 0, 0};
    f[site] = pauli_index;
    return string3(f[0], f[1], f[2]);
  };
  auto C = [&](int site) { return single(3, site); };
  auto A = [&](int site) { return single(1, site); };

  std::vector<CMatrix<Scalar>> gens;
  std::vector<std::string> names;
  if (name == "C" || name == "A" || name == "B") {
    const int p = name == "C" ? 3 : name == "A" ? 1 : 2;
    gens = {single(p, 0), single(p, 1), single(p, 2)};
    names = {name + "1", name + "2", name + "3", name + "t1", name + "t2", name + "t3", name + "tt"};
  } else if (name == "F") {
    gens = {C(0), A(1), A(2)};
    names = {"C1", "A2", "A3", "Ft1", "Ft2", "Ft3", "Ftt"};
  } else if (name == "G") {
    gens = {A(0), C(1), A(2)};
    names = {"A1", "C2", "A3", "Gt1", "Gt2", "Gt3", "Gtt"};
  } else if (name == "H") {
    gens = {A(0), A(1), C(2)};
    names = {"A1", "A2", "C3", "Ht1", "Ht2", "Ht3", "Htt"};
  } else if (name == "Q-candidate" || name == "Q-proper") {
    // F~~ = t3 x t1 x t1, G~~ = t1 x t3 x t1, H~~ = t1 x t1 x t3
    gens = {string3(3, 1, 1), string3(1, 3, 1), string3(1, 1, 3)};
    names = name == "Q-candidate"
                ? std::vector<std::string>{"Ftt", "Gtt", "Htt", "Qt1", "Qt2", "Qt3", "Qtt"}
                : std::vector<std::string>{"Q1", "Q2", "Q3", "Q2Q3", "Q3Q1", "Q1Q2", "Q1Q2Q3"};
  } else {
    throw std::invalid_argument("unknown chain '" + name + "'");
  }
  std::vector<CMatrix<Scalar>> ops{gens[0], gens[1], gens[2], gens[1] * gens[2], gens[0] * gens[2],
                                   gens[0] * gens[1], gens[0] * gens[1] * gens[2]};
  return {name, std::move(names), std::move(ops)};
}

template <typename Scalar>
BitChain<Scalar> make_three_qubit_chain(const std::string& name) {
  auto pc = build_three_qubit_chain<Scalar>(name);
  return make_chain<Scalar>(std::move(pc.operators), std::move(pc.member_names), pc.name);
}

/// Signed Pauli-string description of a matrix, or empty when it is not one.
template <typename Scalar>
std::string describe_pauli(const CMatrix<Scalar>& m) {
  int qubits = 0;
  while ((Index(1) << qubits) < m.rows()) ++qubits;
  if ((Index(1) << qubits) != m.rows() || qubits == 0) return {};
  for (long code = 0; code < (1L << (2 * qubits)); ++code) {
    PauliLabel label;
    long rest = code;
    label.factors.resize(qubits);
    for (int j = qubits - 1; j >= 0; --j) {
      label.factors[j] = static_cast<int>(rest % 4);
      rest /= 4;
    }
    if (int s = detail::signed_match<Scalar>(m, pauli_string_matrix<Scalar>(label), Scalar(tol::kExact))) {
      label.sign = s;
      return label.str();
    }
  }
  return {};
}

/// One product identity v(T_i) v(T_j) = sign v(T_k) taken from a chain table.
struct ChainIdentity {
  std::string chain;
  std::string left, right, result;
  int sign = 1;
  std::string text() const {
    return chain + ": " + left + " . " + right + " = " + (sign < 0 ? "-" : "+") + result;
  }
};

/// Members of different chains recognized as the same operator up to sign.
struct SharedMember {
  std::string member;
  std::string representative;
  int sign = 1;
};

struct KsReport {
  bool consistent = false;
  std::vector<std::string> variables;        // representative member per distinct operator
  std::vector<std::string> variable_labels;  // Pauli form where available
  std::vector<int> assignment;               // +-1 per variable when consistent
  std::vector<SharedMember> identifications;
  std::vector<ChainIdentity> witness;  // identities whose product reads +1 = -1
  std::size_t equation_count = 0;
  std::string conclusion;  // "CONSISTENT" or "CONTRADICTION"
};

namespace detail {

class Bits {
 public:
  explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t(1) << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  Bits& operator^=(const Bits& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }
  bool none() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

 private:
  std::vector<std::uint64_t> words_;
};

}  // namespace detail

/// Propagates the classical product constraints of several chains through a
/// value assignment v(T) = +-1 with v(-T) = -v(T). Constraints are linear over
/// GF(2) in the exponents of v; elimination either yields an assignment or a
/// set of identities whose product gives +1 = -1.
template <typename Scalar>
KsReport ks_contradiction_check(const std::vector<BitChain<Scalar>>& chains) {
  KsReport report;
  std::vector<CMatrix<Scalar>> reps;

  // Map every chain member to (variable, sign).
  std::vector<std::vector<std::pair<std::size_t, int>>> slots(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t i = 0; i < chains[c].size(); ++i) {
      const auto& m = chains[c].members[i];
      const std::string qualified = chains[c].name + "." + chains[c].member_names[i];
      std::size_t var = reps.size();
      int sign = 1;
      for (std::size_t v = 0; v < reps.size(); ++v) {
        if (int s = detail::signed_match<Scalar>(m, reps[v], Scalar(tol::kExact))) {
          var = v;
          sign = s;
          break;
        }
      }
      if (var == reps.size()) {
        reps.push_back(m);
        report.variables.push_back(qualified);
        report.variable_labels.push_back(describe_pauli<Scalar>(m));
      } else if (report.variables[var] != qualified) {
        report.identifications.push_back({qualified, report.variables[var], sign});
      }
      slots[c].push_back({var, sign});
    }
  }

  // One equation per table entry: x_a + x_b + x_c = rhs (mod 2), v = (-1)^x.
  struct Row {
    detail::Bits vars;
    bool rhs;
    detail::Bits origin;
  };
  std::vector<ChainIdentity> identities;
  std::vector<Row> rows;
  const std::size_t nvars = reps.size();
  std::size_t total_eq = 0;
  for (const auto& ch : chains) total_eq += ch.product_table.size();
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (const auto& [key, prod] : chains[c].product_table) {
      const auto [i, j] = key;
      Row row{detail::Bits(nvars), prod.sign < 0, detail::Bits(total_eq)};
      for (std::size_t member : {i, j, prod.k}) {
        row.vars.flip(slots[c][member].first);
        if (slots[c][member].second < 0) row.rhs = !row.rhs;
      }
      row.origin.flip(identities.size());
      identities.push_back({chains[c].name, chains[c].member_names[i], chains[c].member_names[j],
                            chains[c].member_names[prod.k], prod.sign});
      rows.push_back(std::move(row));
    }
  }
  report.equation_count = rows.size();

  std::vector<std::size_t> pivot_row_of(nvars, SIZE_MAX);
  std::size_t rank = 0;
  for (std::size_t v = 0; v < nvars && rank < rows.size(); ++v) {
    std::size_t r = rank;
    while (r < rows.size() && !rows[r].vars.test(v)) ++r;
    if (r == rows.size()) continue;
    std::swap(rows[rank], rows[r]);
    for (std::size_t q = 0; q < rows.size(); ++q) {
      if (q != rank && rows[q].vars.test(v)) {
        rows[q].vars ^= rows[rank].vars;
        rows[q].rhs = rows[q].rhs != rows[rank].rhs;
        rows[q].origin ^= rows[rank].origin;
      }
    }
    pivot_row_of[v] = rank++;
  }

  for (std::size_t q = rank; q < rows.size(); ++q) {
    if (rows[q].vars.none() && rows[q].rhs) {
      report.consistent = false;
      for (std::size_t e = 0; e < identities.size(); ++e)
        if (rows[q].origin.test(e)) report.witness.push_back(identities[e]);
      report.conclusion = "CONTRADICTION";
      return report;
    }
  }

  // Free variables take +1; pivots follow from the reduced rows.
  std::vector<int> x(nvars, 0);
  for (std::size_t v = nvars; v-- > 0;) {
    if (pivot_row_of[v] == SIZE_MAX) continue;
    const Row& row = rows[pivot_row_of[v]];
    int value = row.rhs;
    for (std::size_t u = 0; u < nvars; ++u)
      if (u != v && row.vars.test(u)) value ^= x[u];
    x[v] = value;
  }
  report.consistent = true;
  for (int bit : x) report.assignment.push_back(bit ? -1 : 1);
  report.conclusion = "CONSISTENT";
  return report;
}

}  // namespace qemerge

#endif  // QEMERGE_BIT_CHAINS_HPP_
