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

#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace qemerge {
namespace {

using testing::Rng;
using CM = CMatrix<double>;

CM singlet_matrix() {
  CM m = CM::Zero(4, 4);
  m(1, 1) = m(2, 2) = 0.5;
  m(1, 2) = m(2, 1) = -0.5;
  return m;
}

TEST(DensityFromBloch, Equipartition) {
  for (int q = 1; q <= 3; ++q) {
    auto basis = build_pauli_string_basis<double>(q);
    const Index M = basis->dimension();
    const auto rho = density_from_bloch(BlochState<double>::equipartition(basis));
    EXPECT_LE(max_abs((rho.matrix() - CM::Identity(M, M) / double(M)).eval()), 1e-15);
  }
}

TEST(DensityFromBloch, SingleQubitEigenstate) {
  auto basis = build_pauli_string_basis<double>(1);
  RVector<double> r(1);
  r << 0;
  const auto rho = density_from_bloch(BlochState<double>(basis, testing::unit_rho(3, 2, 1.0)));
  CM expect = CM::Zero(2, 2);
  expect(0, 0) = 1;
  EXPECT_LE(max_abs((rho.matrix() - expect).eval()), 1e-15);
}

TEST(DensityFromBloch, ShortVectorsAreZeroPadded) {
  auto basis = build_pauli_string_basis<double>(1);
  RVector<double> r(1);
  r << 0.5;
  BlochState<double> s(basis, r);
  ASSERT_EQ(s.rho().size(), 3);
  EXPECT_EQ(s.rho()(1), 0.0);
  EXPECT_EQ(s.rho()(2), 0.0);
  EXPECT_THROW(BlochState<double>(basis, RVector<double>::Zero(4)), DimensionError);
}

TEST(DensityFromBloch, SingletMatrix) {
  auto basis = build_pauli_string_basis<double>(2);
  RVector<double> r = RVector<double>::Zero(15);
  r(2) = -1;
  r(11) = -1;
  r(13) = 1;
  const auto rho = density_from_bloch(BlochState<double>(basis, r));
  EXPECT_LE(max_abs((rho.matrix() - singlet_matrix()).eval()), 1e-15);
}

TEST(DensityFromBloch, NegativeEigenvalueIsReportedWithWitness) {
  auto basis = build_pauli_string_basis<double>(1);
  RVector<double> r(3);
  r << 1, 1, 1;
  try {
    density_from_bloch(BlochState<double>(basis, r));
    FAIL() << "expected an invalid state";
  } catch (const InvalidStateError& e) {
    EXPECT_NEAR(e.witness(), (1 - std::sqrt(3.0)) / 2, 1e-12);
  }
}

TEST(BlochFromDensity, Examples) {
  auto basis = build_pauli_string_basis<double>(1);
  CM d = CM::Zero(2, 2);
  d(0, 0) = 1;
  const auto s = bloch_from_density(DensityMatrix<double>(d), basis);
  EXPECT_NEAR(s.rho()(0), 0, 1e-15);
  EXPECT_NEAR(s.rho()(1), 0, 1e-15);
  EXPECT_NEAR(s.rho()(2), 1, 1e-15);

  auto b4 = build_pauli_string_basis<double>(2);
  const auto sing = bloch_from_density(DensityMatrix<double>(singlet_matrix()), b4);
  for (Index k = 0; k < 15; ++k) {
    const double expect = k == 2 || k == 11 ? -1.0 : k == 13 ? 1.0 : 0.0;
    EXPECT_NEAR(sing.rho()(k), expect, 1e-15) << "rho_" << k + 1;
  }
}

TEST(BlochFromDensity, RoundTripOverRandomStates) {
  Rng rng(2024);
  for (int q = 1; q <= 3; ++q) {
    auto basis = build_pauli_string_basis<double>(q);
    const Index M = basis->dimension();
    for (int trial = 0; trial < 1000; ++trial) {
      const CM rho = testing::random_density(M, rng);
      const auto s = bloch_from_density(DensityMatrix<double>(rho), basis);
      const auto back = density_from_bloch(s);
      ASSERT_LE(max_abs((back.matrix() - rho).eval()), 1e-12);
      // tr rho^2 = (1 + P)/M
      ASSERT_NEAR(trace_product<double>(rho, rho).real(), (1 + purity(s)) / double(M), 1e-10);
      ASSERT_TRUE(validate_quantum_state(s).valid());
      ASSERT_LE(purity(s), double(M - 1) + 1e-10);
    }
  }
}

TEST(Purity, Examples) {
  auto b2 = build_pauli_string_basis<double>(1);
  EXPECT_EQ(purity(BlochState<double>::equipartition(b2)), 0.0);
  Rng rng(5);
  const auto pure = bloch_from_density(density_from_wavefunction(WaveFunction<double>(testing::random_wave(2, rng))), b2);
  EXPECT_NEAR(purity(pure), 1.0, 1e-12);
  auto b4 = build_pauli_string_basis<double>(2);
  EXPECT_NEAR(purity(maximally_anticorrelated_state(b4, 1)), 3.0, 0.0);
}

TEST(Copurity, ClosedForms) {
  for (Index M : {2, 4, 8}) {
    const CM rho = CM::Identity(M, M) / double(M);
    const double m = double(M);
    EXPECT_NEAR(copurity<double>(rho), (m - 1) * (m - 1) / (m * m * m), 1e-15);
  }
  CM d = CM::Zero(2, 2);
  d(0, 0) = 0.75;
  d(1, 1) = 0.25;
  EXPECT_NEAR(copurity<double>(d), 9.0 / 128.0, 1e-15);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const CVector<double> psi = testing::random_wave(4, rng);
    EXPECT_LE(copurity(density_from_wavefunction(WaveFunction<double>(psi))), 1e-14);
  }
}

TEST(Copurity, MaximalPurityIsNotSufficientForPurity) {
  // P = M - 1 = 3 but rho = (1 + sqrt3 L_1)/4 has eigenvalues (1 +- sqrt3)/4.
  auto basis = build_pauli_string_basis<double>(2);
  const auto s = BlochState<double>(basis, testing::unit_rho(15, 0, std::sqrt(3.0)));
  EXPECT_NEAR(purity(s), 3.0, 1e-12);
  const CM rho = assemble_density(s);
  EXPECT_GT(copurity<double>(rho), 1e-3);
  EXPECT_FALSE(validate_quantum_state(s).valid());

  // Conversely zero copurity comes with P = M - 1.
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto st = bloch_from_density(density_from_wavefunction(WaveFunction<double>(testing::random_wave(4, rng))), basis);
    EXPECT_NEAR(purity(st), 3.0, 1e-10);
  }
}

TEST(WaveFunction, FromPureDensityExamples) {
  CM d = CM::Zero(3, 3);
  d(0, 0) = 1;
  const auto psi = wavefunction_from_pure(DensityMatrix<double>(d));
  EXPECT_LE(max_abs((psi.vector() - WaveFunction<double>::unit(3, 0).vector()).eval()), 1e-15);

  const double h = 1 / std::sqrt(2.0);
  auto basis = build_pauli_string_basis<double>(2);
  for (int eps : {1, -1}) {
    const auto w = wavefunction_from_pure(density_from_bloch(maximally_anticorrelated_state(basis, eps)));
    // phase convention: first component of largest modulus real, non-negative
    EXPECT_NEAR(w(0).real(), 0, 1e-12);
    EXPECT_NEAR(w(1).real(), h, 1e-12);
    EXPECT_NEAR(w(1).imag(), 0, 1e-12);
    EXPECT_NEAR(w(2).real(), eps > 0 ? -h : h, 1e-12);
    EXPECT_NEAR(w(2).imag(), 0, 1e-12);
    EXPECT_NEAR(std::abs(w(3)), 0, 1e-12);
  }
}

TEST(WaveFunction, RejectsMixedStates) {
  CM d = CM::Zero(2, 2);
  d(0, 0) = 0.75;
  d(1, 1) = 0.25;
  try {
    wavefunction_from_pure(DensityMatrix<double>(d));
    FAIL() << "expected rejection";
  } catch (const InvalidStateError& e) {
    EXPECT_NEAR(e.witness(), 9.0 / 128.0, 1e-15);
  }
}

TEST(WaveFunction, RoundTripAndGlobalPhase) {
  Rng rng(17);
  for (Index M : {2, 4, 8}) {
    for (int trial = 0; trial < 100; ++trial) {
      const CVector<double> v = testing::random_wave(M, rng);
      const auto rho = density_from_wavefunction(WaveFunction<double>(v));
      const auto psi = wavefunction_from_pure(rho);
      ASSERT_LE(max_abs((density_from_wavefunction(psi).matrix() - rho.matrix()).eval()), 1e-8);
      // psi differs from v by a global phase only
      const Complex<double> overlap = v.adjoint() * psi.vector();
      ASSERT_NEAR(std::abs(overlap), 1.0, 1e-10);
      const double chi = testing::uniform(rng, 0, 6.28);
      const CVector<double> rotated = v * std::polar(1.0, chi);
      ASSERT_LE(max_abs((density_from_wavefunction(WaveFunction<double>(rotated)).matrix() - rho.matrix()).eval()),
                1e-14);
    }
  }
}

TEST(WaveFunction, NormIsChecked) {
  CVector<double> v = CVector<double>::Zero(2);
  v(0) = 1.001;
  EXPECT_THROW(WaveFunction<double>{v}, InvalidStateError);
}

TEST(ValidateQuantumState, Examples) {
  auto b2 = build_pauli_string_basis<double>(1);
  const auto eq = validate_quantum_state(BlochState<double>::equipartition(b2));
  EXPECT_TRUE(eq.valid());
  EXPECT_EQ(eq.purity, 0.0);

  auto b4 = build_pauli_string_basis<double>(2);
  const auto sing = validate_quantum_state(maximally_anticorrelated_state(b4, 1));
  EXPECT_TRUE(sing.valid());
  EXPECT_NEAR(sing.purity, 3.0, 1e-15);
  EXPECT_EQ(sing.purity_bound, 3.0);

  RVector<double> r(3);
  r << 1, 1, 1;
  const auto bad = validate_quantum_state(BlochState<double>(b2, r));
  EXPECT_FALSE(bad.purity_ok);
  EXPECT_FALSE(bad.positive);
  EXPECT_NEAR(bad.purity, 3.0, 1e-15);
  EXPECT_NEAR(bad.min_eigenvalue, (1 - std::sqrt(3.0)) / 2, 1e-12);
}

TEST(LongDouble, StateRoundTrip) {
  auto basis = build_pauli_string_basis<long double>(2);
  auto s = maximally_anticorrelated_state(basis, 1);
  const auto rho = density_from_bloch(s);
  const auto back = bloch_from_density(rho, basis);
  EXPECT_LE((back.rho() - s.rho()).cwiseAbs().maxCoeff(), 1e-18L);
  EXPECT_LE(copurity(rho), 1e-18L);
}

}  // namespace
}  // namespace qemerge
