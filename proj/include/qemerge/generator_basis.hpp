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

#ifndef QEMERGE_GENERATOR_BASIS_HPP_
#define QEMERGE_GENERATOR_BASIS_HPP_

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qemerge/core.hpp"

namespace qemerge {

/// Composition of a generator as a signed tensor product of Pauli matrices.
/// `factors[j]` is 0 for the identity and 1..3 for tau_1..tau_3; the first
/// factor acts on the most significant qubit.
struct PauliLabel {
  std::vector<int> factors;
  int sign = 1;

  std::string str() const {
    static const char* names[] = {"1", "t1", "t2", "t3"};
    std::ostringstream os;
    if (sign < 0) os << '-';
    os << '(';
    for (std::size_t j = 0; j < factors.size(); ++j) {
      if (j) os << 'x';
      os << names[factors[j]];
    }
    os << ')';
    return os.str();
  }

  friend bool operator==(const PauliLabel&, const PauliLabel&) = default;
};

template <typename Scalar>
CMatrix<Scalar> pauli_string_matrix(const PauliLabel& label) {
  CMatrix<Scalar> m = CMatrix<Scalar>::Identity(1, 1);
  for (int f : label.factors) m = kron<Scalar>(m, pauli<Scalar>(f));
  return m * Scalar(label.sign);
}

/// Hermitian generators L_1..L_n (stored 0-based) of an M-level system.
/// `index_table` is filled only for the built-in Pauli-string bases.
template <typename Scalar>
class GeneratorBasis {
 public:
  GeneratorBasis(Index dimension, std::vector<CMatrix<Scalar>> generators,
                 std::vector<PauliLabel> index_table = {})
      : dimension_(dimension),
        generators_(std::move(generators)),
        index_table_(std::move(index_table)) {
    if (dimension_ < 1) throw DimensionError("basis dimension must be positive");
    if (!index_table_.empty() && index_table_.size() != generators_.size())
      throw InvalidBasisError("index table size differs from generator count");
  }

  Index dimension() const noexcept { return dimension_; }
  Index size() const noexcept { return static_cast<Index>(generators_.size()); }
  const CMatrix<Scalar>& operator[](Index k) const { return generators_.at(k); }
  const std::vector<CMatrix<Scalar>>& generators() const noexcept { return generators_; }
  const std::vector<PauliLabel>& index_table() const noexcept { return index_table_; }
  bool is_pauli() const noexcept { return !index_table_.empty(); }

  /// Position of a signed Pauli string in the basis, if present.
  /// Returns {index, relative sign} or {-1, 0}.
  std::pair<Index, int> find(const std::vector<int>& factors) const {
    for (std::size_t k = 0; k < index_table_.size(); ++k)
      if (index_table_[k].factors == factors) return {static_cast<Index>(k), index_table_[k].sign};
    return {-1, 0};
  }

 private:
  Index dimension_;
  std::vector<CMatrix<Scalar>> generators_;
  std::vector<PauliLabel> index_table_;
};

template <typename Scalar>
using BasisPtr = std::shared_ptr<const GeneratorBasis<Scalar>>;

namespace detail {

// Two-qubit labelling: the nine named generators follow the entanglement
// section's representation, the remaining six fill the odd slots 5..15.
inline std::vector<PauliLabel> two_qubit_labels() {
  return {
      {{3, 0}, 1},   // L1
      {{0, 3}, 1},   // L2
      {{3, 3}, 1},   // L3
      {{0, 1}, 1},   // L4
      {{0, 2}, 1},   // L5
      {{3, 1}, 1},   // L6
      {{2, 0}, 1},   // L7
      {{1, 0}, 1},   // L8
      {{2, 3}, 1},   // L9
      {{1, 3}, 1},   // L10
      {{3, 2}, 1},   // L11
      {{1, 1}, 1},   // L12
      {{2, 1}, 1},   // L13
      {{2, 2}, -1},  // L14
      {{1, 2}, 1},   // L15
  };
}

inline std::vector<PauliLabel> lexicographic_labels(int qubits) {
  std::vector<PauliLabel> out;
  const long count = 1L << (2 * qubits);
  for (long code = 1; code < count; ++code) {
    PauliLabel label;
    label.factors.resize(qubits);
    long rest = code;
    for (int j = qubits - 1; j >= 0; --j) {
      label.factors[j] = static_cast<int>(rest % 4);
      rest /= 4;
    }
    out.push_back(label);
  }
  return out;
}

}  // namespace detail

inline constexpr int kMaxQubits = 4;

/// All 4^q - 1 non-identity Pauli strings as SU(2^q) generators.
template <typename Scalar = double>
BasisPtr<Scalar> build_pauli_string_basis(int qubit_count) {
  if (qubit_count < 1) throw DimensionError("qubit count must be at least 1");
  if (qubit_count > kMaxQubits)
    throw CapExceededError("Pauli-string basis is capped at M = 16 (4 qubits)");
  auto labels = qubit_count == 2 ? detail::two_qubit_labels()
                                 : detail::lexicographic_labels(qubit_count);
  std::vector<CMatrix<Scalar>> gens;
  gens.reserve(labels.size());
  for (const auto& l : labels) gens.push_back(pauli_string_matrix<Scalar>(l));
  return std::make_shared<const GeneratorBasis<Scalar>>(Index(1) << qubit_count,
                                                        std::move(gens), std::move(labels));
}

/// Structure constants f_klm and d_klm, stored sparsely per ordered pair (k, l).
template <typename Scalar>
class StructureConstants {
 public:
  struct Term {
    Index m;
    Scalar f;
    Scalar d;
  };

  explicit StructureConstants(Index n) : n_(n), terms_(static_cast<std::size_t>(n * n)) {}

  Index size() const noexcept { return n_; }

  Scalar f(Index k, Index l, Index m) const { return lookup(k, l, m).first; }
  Scalar d(Index k, Index l, Index m) const { return lookup(k, l, m).second; }

  const std::vector<Term>& terms(Index k, Index l) const { return terms_[k * n_ + l]; }

  void add(Index k, Index l, Index m, Scalar f, Scalar d) {
    terms_[k * n_ + l].push_back({m, f, d});
  }

 private:
  std::pair<Scalar, Scalar> lookup(Index k, Index l, Index m) const {
    for (const auto& t : terms_.at(k * n_ + l))
      if (t.m == m) return {t.f, t.d};
    return {Scalar(0), Scalar(0)};
  }

  Index n_;
  std::vector<std::vector<Term>> terms_;
};

namespace detail {

// tau_a tau_b = phase * tau_c for single-qubit Pauli indices (0 = identity).
inline std::pair<std::complex<double>, int> pauli_product(int a, int b) {
  if (a == 0) return {1.0, b};
  if (b == 0) return {1.0, a};
  if (a == b) return {1.0, 0};
  const int c = 6 - a - b;
  // Levi-Civita sign of (a, b, c).
  const bool cyclic = (a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1);
  return {std::complex<double>(0.0, cyclic ? 1.0 : -1.0), c};
}

template <typename Scalar>
StructureConstants<Scalar> pauli_structure_constants(const GeneratorBasis<Scalar>& basis) {
  const Index n = basis.size();
  const auto& table = basis.index_table();
  std::map<std::vector<int>, std::pair<Index, int>> lookup;
  for (Index k = 0; k < n; ++k) lookup[table[k].factors] = {k, table[k].sign};

  StructureConstants<Scalar> sc(n);
  for (Index k = 0; k < n; ++k) {
    for (Index l = 0; l < n; ++l) {
      if (k == l) continue;
      std::complex<double> phase = double(table[k].sign * table[l].sign);
      std::vector<int> factors(table[k].factors.size());
      for (std::size_t j = 0; j < factors.size(); ++j) {
        auto [p, c] = pauli_product(table[k].factors[j], table[l].factors[j]);
        phase *= p;
        factors[j] = c;
      }
      auto it = lookup.find(factors);
      if (it == lookup.end()) throw InvalidBasisError("Pauli basis is not closed under products");
      const auto [m, sign_m] = it->second;
      phase *= double(sign_m);  // L_k L_l = phase * L_m
      // Pauli strings either commute (real phase) or anticommute (imaginary phase).
      if (std::abs(phase.imag()) > 0.5)
        sc.add(k, l, m, Scalar(phase.imag()), Scalar(0));
      else
        sc.add(k, l, m, Scalar(0), Scalar(phase.real()));
    }
  }
  return sc;
}

// Coefficients tr(X L_m) / M for a batch of matrices X, one column per matrix.
template <typename Scalar>
CMatrix<Scalar> project_batch(const GeneratorBasis<Scalar>& basis,
                              const std::vector<CMatrix<Scalar>>& mats) {
  const Index M = basis.dimension();
  const Index n = basis.size();
  CMatrix<Scalar> g(n, M * M);
  for (Index m = 0; m < n; ++m) {
    const CMatrix<Scalar> t = basis[m].transpose();
    g.row(m) = Eigen::Map<const CVector<Scalar>>(t.data(), M * M).transpose();
  }
  CMatrix<Scalar> x(M * M, static_cast<Index>(mats.size()));
  for (std::size_t j = 0; j < mats.size(); ++j)
    x.col(static_cast<Index>(j)) = Eigen::Map<const CVector<Scalar>>(mats[j].data(), M * M);
  return (g * x) / Scalar(M);
}

// f and d by projection, plus the largest imaginary residue of either.
template <typename Scalar>
std::pair<StructureConstants<Scalar>, Scalar> projected_structure_constants(
    const GeneratorBasis<Scalar>& basis) {
  const Index n = basis.size();
  StructureConstants<Scalar> sc(n);
  Scalar imag_defect = 0;
  const Scalar keep = Scalar(1e-14);
  for (Index k = 0; k < n; ++k) {
    std::vector<CMatrix<Scalar>> comms, antis;
    comms.reserve(n);
    antis.reserve(n);
    for (Index l = 0; l < n; ++l) {
      comms.push_back(commutator<Scalar>(basis[k], basis[l]));
      antis.push_back(anticommutator<Scalar>(basis[k], basis[l]));
    }
    // f = tr([L_k,L_l] L_m) / (2iM), d = tr({L_k,L_l} L_m) / (2M)
    const CMatrix<Scalar> fc = project_batch(basis, comms) / Complex<Scalar>(0, 2);
    const CMatrix<Scalar> dc = project_batch(basis, antis) / Scalar(2);
    for (Index l = 0; l < n; ++l) {
      for (Index m = 0; m < n; ++m) {
        imag_defect = std::max({imag_defect, std::abs(fc(m, l).imag()), std::abs(dc(m, l).imag())});
        const Scalar fv = fc(m, l).real(), dv = dc(m, l).real();
        if (std::abs(fv) > keep || std::abs(dv) > keep) sc.add(k, l, m, fv, dv);
      }
    }
  }
  return {std::move(sc), imag_defect};
}

}  // namespace detail

/// Structure constants of a basis: exact Pauli-string multiplication for
/// labelled bases, trace projection otherwise.
template <typename Scalar>
StructureConstants<Scalar> structure_constants(const GeneratorBasis<Scalar>& basis) {
  if (basis.is_pauli()) return detail::pauli_structure_constants(basis);
  auto [sc, imag_defect] = detail::projected_structure_constants(basis);
  if (imag_defect > Scalar(tol::kAlgebra))
    throw InvalidBasisError("structure constants have an imaginary part of " +
                            std::to_string(static_cast<double>(imag_defect)));
  return std::move(sc);
}

/// Trace-projection route, regardless of labels. Used as an independent check.
template <typename Scalar>
StructureConstants<Scalar> structure_constants_by_projection(const GeneratorBasis<Scalar>& basis) {
  auto [sc, imag_defect] = detail::projected_structure_constants(basis);
  if (imag_defect > Scalar(tol::kAlgebra))
    throw InvalidBasisError("structure constants have an imaginary part");
  return std::move(sc);
}

/// Largest elementwise deviation of [L_k,L_l] - 2i f_klm L_m and
/// {L_k,L_l} - 2 delta_kl - 2 d_klm L_m over all pairs.
template <typename Scalar>
std::pair<Scalar, Scalar> reconstruction_defect(const GeneratorBasis<Scalar>& basis,
                                                const StructureConstants<Scalar>& sc) {
  const Index n = basis.size();
  const Index M = basis.dimension();
  const CMatrix<Scalar> id = CMatrix<Scalar>::Identity(M, M);
  Scalar comm_defect = 0, anti_defect = 0;
  for (Index k = 0; k < n; ++k) {
    for (Index l = 0; l < n; ++l) {
      CMatrix<Scalar> comm = commutator<Scalar>(basis[k], basis[l]);
      CMatrix<Scalar> anti = anticommutator<Scalar>(basis[k], basis[l]);
      if (k == l) anti -= Scalar(2) * id;
      for (const auto& t : sc.terms(k, l)) {
        comm -= Complex<Scalar>(0, 2 * t.f) * basis[t.m];
        anti -= Scalar(2 * t.d) * basis[t.m];
      }
      comm_defect = std::max(comm_defect, max_abs(comm));
      anti_defect = std::max(anti_defect, max_abs(anti));
    }
  }
  return {comm_defect, anti_defect};
}

struct BasisViolation {
  std::string relation;
  std::vector<Index> generators;  // 1-based generator numbers
  double max_deviation = 0;
};

struct BasisReport {
  std::vector<BasisViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
  bool flags(const std::string& relation) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const BasisViolation& v) { return v.relation == relation; });
  }
};

/// Largest M for which validate_basis reconstructs commutators and
/// anticommutators explicitly. Above it the closure relations follow from
/// the count, trace, hermiticity and orthonormality checks.
inline constexpr Index kExplicitClosureMaxDimension = 8;

/// Checks every generator relation and reports the violated ones.
template <typename Scalar>
BasisReport validate_basis(const GeneratorBasis<Scalar>& basis) {
  BasisReport report;
  const Index M = basis.dimension();
  const Index n = basis.size();
  const Scalar exact = Scalar(tol::kExact);
  const Scalar algebra = Scalar(tol::kAlgebra);

  auto record = [&](const std::string& relation, Index k, double dev) {
    auto it = std::find_if(report.violations.begin(), report.violations.end(),
                           [&](const BasisViolation& v) { return v.relation == relation; });
    if (it == report.violations.end()) {
      report.violations.push_back({relation, {}, 0});
      it = std::prev(report.violations.end());
    }
    if (k >= 0 && std::find(it->generators.begin(), it->generators.end(), k + 1) == it->generators.end())
      it->generators.push_back(k + 1);
    it->max_deviation = std::max(it->max_deviation, dev);
  };

  if (n != M * M - 1) record("generator_count", -1, static_cast<double>(std::abs(n - (M * M - 1))));
  bool shapes_ok = true;
  for (Index k = 0; k < n; ++k) {
    if (basis[k].rows() != M || basis[k].cols() != M) {
      record("shape", k, 1.0);
      shapes_ok = false;
    }
  }
  if (!shapes_ok) return report;

  const CMatrix<Scalar> id = CMatrix<Scalar>::Identity(M, M);
  for (Index k = 0; k < n; ++k) {
    const auto& L = basis[k];
    const Scalar herm = hermiticity_defect<Scalar>(L);
    if (herm > exact) record("hermitian", k, static_cast<double>(herm));
    const Scalar tr = std::abs(L.trace());
    if (tr > exact) record("traceless", k, static_cast<double>(tr));
    const Scalar sq = max_abs((L * L - id).eval());
    if (sq > exact) record("square_is_identity", k, static_cast<double>(sq));
  }
  for (Index k = 0; k < n; ++k) {
    for (Index l = k; l < n; ++l) {
      const Complex<Scalar> t = trace_product<Scalar>(basis[k], basis[l]);
      const Scalar dev = std::abs(t - Complex<Scalar>(k == l ? Scalar(M) : Scalar(0)));
      if (dev > exact) {
        record("orthonormality", k, static_cast<double>(dev));
        if (l != k) record("orthonormality", l, static_cast<double>(dev));
      }
    }
  }

  if (M <= kExplicitClosureMaxDimension && n > 0) {
    auto [sc, imag_defect] = detail::projected_structure_constants(basis);
    if (imag_defect > algebra) record("structure_constants_real", -1, static_cast<double>(imag_defect));
    const auto [comm, anti] = reconstruction_defect(basis, sc);
    if (comm > algebra) record("commutator_closure", -1, static_cast<double>(comm));
    if (anti > algebra) record("anticommutator_closure", -1, static_cast<double>(anti));
  }
  return report;
}

}  // namespace qemerge

#endif  // QEMERGE_GENERATOR_BASIS_HPP_
