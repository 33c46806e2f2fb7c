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

BasisPtr<double> qubit() { return build_pauli_string_basis<double>(1); }

RVector<double> vec3(double a, double b, double c) {
  RVector<double> v(3);
  v << a, b, c;
  return v;
}

TEST(HamiltonianToGenerator, Examples) {
  auto b = qubit();
  const auto sc = structure_constants(*b);
  EXPECT_EQ(hamiltonian_to_generator<double>(RVector<double>::Zero(3), sc).T, RMatrix<double>::Zero(3, 3));

  const double omega = 1.7;
  const auto spec = hamiltonian_to_generator<double>(vec3(0, 0, omega / 2), sc);
  EXPECT_NEAR(spec.T(0, 1), -omega, 1e-15);
  EXPECT_NEAR(spec.T(1, 0), omega, 1e-15);
  EXPECT_EQ(spec.T(0, 2), 0.0);
  EXPECT_EQ(spec.T(1, 2), 0.0);
  EXPECT_EQ(spec.residual, RMatrix<double>::Zero(3, 3));

  auto b4 = build_pauli_string_basis<double>(2);
  const auto sc4 = structure_constants(*b4);
  const auto t4 = hamiltonian_to_generator<double>(testing::unit_rho(15, 2, 1.0), sc4).T;
  for (Index k = 0; k < 15; ++k)
    for (Index l = 0; l < 15; ++l) EXPECT_EQ(t4(k, l) != 0.0, sc4.f(k, l, 2) != 0.0) << k << ' ' << l;
  EXPECT_LE(antisymmetry_defect(t4), 0.0);
}

TEST(HamiltonianToGenerator, MatchesTheCommutatorAction) {
  // tr(L_k (-i[H, rho])) equals T_kl rho_l.
  Rng rng(1);
  for (int q = 1; q <= 3; ++q) {
    auto b = build_pauli_string_basis<double>(q);
    const auto sc = structure_constants(*b);
    for (int trial = 0; trial < 5; ++trial) {
      const auto h = testing::random_operator(b, rng);
      const auto T = unitary_generator(h.e(), sc);
      const auto s = testing::random_state(b, rng);
      const CM rho = assemble_density(s);
      const CM drho = Complex<double>(0, -1) * commutator<double>(h.matrix(), rho);
      const RVector<double> flow = T * s.rho();
      for (Index k = 0; k < b->size(); ++k)
        ASSERT_NEAR(trace_product<double>(drho, (*b)[k]).real(), flow(k), 1e-12);
    }
  }
}

TEST(MakeEvolutionSpec, ResidualMustBeAntisymmetric) {
  auto b = qubit();
  const auto sc = structure_constants(*b);
  RMatrix<double> bad = RMatrix<double>::Zero(3, 3);
  bad(0, 1) = 1;
  EXPECT_THROW(make_evolution_spec<double>(vec3(0, 0, 0), bad, 0.0, sc), Error);
  bad(1, 0) = -1;
  const auto spec = make_evolution_spec<double>(vec3(0, 0, 1), bad, 0.2, sc);
  EXPECT_NEAR(spec.T(0, 1), -2 + 1, 1e-15);
  EXPECT_EQ(spec.D, 0.2);
}

TEST(EvolveBloch, ConstantWithoutGenerator) {
  auto b = qubit();
  EvolutionSpec<double> spec{RMatrix<double>::Zero(3, 3), 0.0, std::nullopt, RMatrix<double>::Zero(3, 3)};
  const auto traj = evolve_bloch(BlochState<double>(b, vec3(0.1, 0.2, 0.3)), spec, 1.0, 0.1);
  ASSERT_EQ(traj.size(), 11u);
  for (const auto& s : traj.states) EXPECT_EQ(s.rho(), vec3(0.1, 0.2, 0.3));
  for (std::size_t i = 1; i < traj.size(); ++i) EXPECT_GT(traj.times[i], traj.times[i - 1]);
  EXPECT_EQ(traj.times.back(), 1.0);
}

TEST(EvolveBloch, PrecessionClosedForm) {
  auto b = qubit();
  const double omega = 2.3;
  const auto spec = hamiltonian_to_generator<double>(vec3(0, 0, omega / 2), structure_constants(*b));
  const auto traj = evolve_bloch(BlochState<double>(b, vec3(1, 0, 0)), spec, 5.0, 1e-3, 100);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    ASSERT_NEAR(traj.states[i].rho()(0), std::cos(omega * t), 1e-10);
    ASSERT_NEAR(traj.states[i].rho()(1), std::sin(omega * t), 1e-10);
    ASSERT_EQ(traj.states[i].rho()(2), 0.0);
    ASSERT_TRUE(traj.valid[i]);
  }
}

TEST(EvolveBloch, FourthOrderConvergence) {
  auto b = qubit();
  const double omega = 1.0, t_final = 10.0;
  const auto spec = hamiltonian_to_generator<double>(vec3(0, 0, omega / 2), structure_constants(*b));
  auto error = [&](double dt) {
    const auto traj = evolve_bloch(BlochState<double>(b, vec3(1, 0, 0)), spec, t_final, dt, 1000000);
    const auto& r = traj.states.back().rho();
    return std::hypot(r(0) - std::cos(omega * t_final), r(1) - std::sin(omega * t_final));
  };
  const double e1 = error(0.1), e2 = error(0.05), e3 = error(0.025);
  EXPECT_NEAR(e1 / e2, 16.0, 2.0);
  EXPECT_NEAR(e2 / e3, 16.0, 2.0);
}

TEST(EvolveBloch, PurityConservedWithoutScaling) {
  Rng rng(2);
  for (int q = 1; q <= 2; ++q) {
    auto b = build_pauli_string_basis<double>(q);
    const auto sc = structure_constants(*b);
    for (int trial = 0; trial < 5; ++trial) {
      const auto h = testing::random_operator(b, rng);
      const auto s = testing::random_state(b, rng);
      const auto traj = evolve_bloch(s, hamiltonian_to_generator(h.e(), sc), 1.0, 1e-3, 50);
      for (std::size_t i = 0; i < traj.size(); ++i) ASSERT_NEAR(traj.purity[i], traj.purity[0], 1e-9);
    }
  }
}

TEST(EvolveBloch, ExponentialPurityUnderConstantRate) {
  auto b = qubit();
  EvolutionSpec<double> spec{RMatrix<double>::Zero(3, 3), -0.1, std::nullopt, RMatrix<double>::Zero(3, 3)};
  const auto traj = evolve_bloch(BlochState<double>(b, vec3(0, 0, 1)), spec, 10.0, 1e-3, 1000);
  EXPECT_NEAR(traj.purity.back() / std::exp(-2.0), 1.0, 1e-6);

  Rng rng(3);
  auto b4 = build_pauli_string_basis<double>(2);
  const auto sc = structure_constants(*b4);
  for (double D : {-0.3, 0.05}) {
    const auto s = testing::random_state(b4, rng, 0.0);
    const auto h = testing::random_operator(b4, rng);
    const auto t = evolve_bloch(s, make_evolution_spec<double>(h.e(), RMatrix<double>(), D, sc), 10.0, 1e-3, 500);
    for (std::size_t i = 0; i < t.size(); ++i)
      ASSERT_NEAR(t.purity[i] / (t.purity[0] * std::exp(2 * D * t.times[i])), 1.0, 1e-6);
  }
}

TEST(EvolveBloch, PurityFlowLaw) {
  // dP/dt = 2 D P for any antisymmetric T, checked by central differences.
  Rng rng(4);
  auto b = build_pauli_string_basis<double>(2);
  const auto sc = structure_constants(*b);
  const double D = -0.4;
  const auto spec = make_evolution_spec<double>(testing::random_operator(b, rng).e(), RMatrix<double>(), D, sc);
  const auto traj = evolve_bloch(testing::random_state(b, rng, 0.0), spec, 1.0, 1e-4, 10);
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const double dp = (traj.purity[i + 1] - traj.purity[i - 1]) / (traj.times[i + 1] - traj.times[i - 1]);
    ASSERT_NEAR(dp / (2 * D * traj.purity[i]), 1.0, 1e-6);
  }
}

TEST(EvolveVonNeumann, AgreesWithBlochSpace) {
  Rng rng(5);
  for (int q = 1; q <= 2; ++q) {
    auto b = build_pauli_string_basis<double>(q);
    const auto sc = structure_constants(*b);
    for (int trial = 0; trial < 10; ++trial) {
      const auto h = testing::random_operator(b, rng);
      const auto s = testing::random_state(b, rng);
      const auto bloch = evolve_bloch(s, hamiltonian_to_generator(h.e(), sc), 1.0, 1e-3, 100);
      const auto matrix = evolve_von_neumann(density_from_bloch(s), h, 1.0, 1e-3, 100);
      ASSERT_EQ(bloch.size(), matrix.size());
      for (std::size_t i = 0; i < bloch.size(); ++i) {
        const CM a = assemble_density(bloch.states[i]);
        ASSERT_LE(max_abs((a - matrix.matrices[i]).eval()), 1e-8);
      }
    }
  }
}

TEST(EvolveVonNeumann, ConservesTraceHermiticityAndSpectrum) {
  Rng rng(6);
  auto b = build_pauli_string_basis<double>(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto h = testing::random_operator(b, rng);
    const auto rho = DensityMatrix<double>(testing::random_density(4, rng));
    const auto ev0 = hermitian_eigenvalues<double>(rho.matrix());
    const auto traj = evolve_von_neumann(rho, h, 1.0, 1e-3, 100);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const CM& m = traj.matrices[i];
      ASSERT_NEAR(m.trace().real(), 1.0, 1e-12);
      ASSERT_LE(hermiticity_defect<double>(m), 1e-12);
      ASSERT_LE((hermitian_eigenvalues<double>(m) - ev0).cwiseAbs().maxCoeff(), 1e-8);
      ASSERT_NEAR(traj.copurity[i], traj.copurity[0], 1e-8);
    }
  }
}

TEST(EvolveVonNeumann, FixedPoints) {
  Rng rng(7);
  auto b = build_pauli_string_basis<double>(2);
  const auto h = testing::random_operator(b, rng);
  for (const auto& level : energy_eigenstates(h)) {
    const auto rho = density_from_wavefunction(level.state);
    const auto traj = evolve_von_neumann(rho, h, 1.0, 1e-3, 1000);
    EXPECT_LE(max_abs((traj.matrices.back() - rho.matrix()).eval()), 1e-10);
  }
  const auto gibbs = boltzmann_state(h, 0.8);
  EXPECT_LE(max_abs((evolve_von_neumann(gibbs, h, 1.0, 1e-3, 1000).matrices.back() - gibbs.matrix()).eval()), 1e-10);
  const DensityMatrix<double> eq(CM::Identity(4, 4) / 4.0);
  EXPECT_LE(max_abs((evolve_von_neumann(eq, h, 1.0, 1e-3, 1000).matrices.back() - eq.matrix()).eval()), 1e-15);
}

TEST(EvolveVonNeumann, PrecessionPhaseConvention) {
  auto b = qubit();
  const double omega = 0.9;
  const auto h = operator_from_coefficients<double>(0, vec3(0, 0, omega / 2), b);
  const auto traj = evolve_von_neumann(density_from_bloch(BlochState<double>(b, vec3(1, 0, 0))), h, 3.0, 1e-3, 500);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    ASSERT_NEAR(traj.states[i].rho()(0), std::cos(omega * traj.times[i]), 1e-10);
    ASSERT_NEAR(traj.states[i].rho()(1), std::sin(omega * traj.times[i]), 1e-10);
  }
}

TEST(EvolveSchrodinger, TracksVonNeumannAndConservesNorm) {
  Rng rng(8);
  for (int q = 1; q <= 2; ++q) {
    auto b = build_pauli_string_basis<double>(q);
    const auto h = testing::random_operator(b, rng);
    const WaveFunction<double> psi(testing::random_wave(b->dimension(), rng));
    const auto wave = evolve_schrodinger(psi, h, 1.0, 1e-3, 100);
    const auto vn = evolve_von_neumann(density_from_wavefunction(psi), h, 1.0, 1e-3, 100);
    ASSERT_EQ(wave.states.size(), vn.matrices.size());
    for (std::size_t i = 0; i < wave.states.size(); ++i) {
      EXPECT_NEAR(wave.states[i].norm(), 1.0, 1e-10);
      const CM outer = wave.states[i] * wave.states[i].adjoint();
      EXPECT_LE(max_abs((outer - vn.matrices[i]).eval()), 1e-8);
    }
  }
}

TEST(EvolveSchrodinger, EigenstateAcquiresPhaseOnly) {
  auto b = qubit();
  const auto h = generator_operator(b, 2);  // tau_3, psi_1 has E = 1
  const auto wave = evolve_schrodinger(WaveFunction<double>::unit(2, 0), h, 2.0, 1e-3, 2000);
  EXPECT_NEAR(std::abs(wave.states.back()(0) - std::polar(1.0, -2.0)), 0.0, 1e-10);
  const auto zero = operator_from_coefficients<double>(0, RVector<double>::Zero(3), b);
  Rng rng(9);
  const CVector<double> v = testing::random_wave(2, rng);
  EXPECT_LE(max_abs((evolve_schrodinger(WaveFunction<double>(v), zero, 1.0, 0.1).states.back() - v).eval()), 0.0);
}

TEST(EnergyEigenstates, Examples) {
  auto b = qubit();
  const auto levels = energy_eigenstates(generator_operator(b, 2));
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_NEAR(levels[0].energy, -1, 1e-15);
  EXPECT_NEAR(levels[1].energy, 1, 1e-15);
  EXPECT_NEAR(std::abs(levels[0].state(1)), 1, 1e-15);
  EXPECT_NEAR(std::abs(levels[1].state(0)), 1, 1e-15);

  auto b4 = build_pauli_string_basis<double>(2);
  const auto s = energy_eigenstates(generator_operator(b4, 0) + generator_operator(b4, 1));
  const double expect[4] = {-2, 0, 0, 2};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(s[j].energy, expect[j], 1e-14);
  // Degenerate zero subspace: compare projectors.
  const CM proj = s[1].state.vector() * s[1].state.vector().adjoint() + s[2].state.vector() * s[2].state.vector().adjoint();
  CM expect_proj = CM::Zero(4, 4);
  expect_proj(1, 1) = expect_proj(2, 2) = 1;
  EXPECT_LE(max_abs((proj - expect_proj).eval()), 1e-14);
}

TEST(BoltzmannState, ClosedForms) {
  auto b = qubit();
  const auto t3 = generator_operator(b, 2);
  EXPECT_LE(max_abs((boltzmann_state(t3, 0.0).matrix() - CM::Identity(2, 2) / 2.0).eval()), 1e-15);
  const auto g1 = boltzmann_state(t3, 1.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(g1(0, 0).real(), (1 / e) / (e + 1 / e), 1e-15);
  EXPECT_NEAR(g1(1, 1).real(), e / (e + 1 / e), 1e-15);
  EXPECT_NEAR(purity(bloch_from_density(g1, b)), std::pow(std::tanh(1.0), 2), 1e-15);
  const auto cold = boltzmann_state(t3, 20.0);
  EXPECT_NEAR(cold(1, 1).real(), 1.0, 2 * std::exp(-40.0));
  EXPECT_THROW(boltzmann_state(t3, -1.0), std::invalid_argument);
}

TEST(Syncoherence, SaturatingProfileFollowsLogisticPurity) {
  // dP/dt = 2 D (1 - P) P for M = 2, H = 0.
  auto b = qubit();
  const auto sc = structure_constants(*b);
  const double D = 0.5, p0 = 0.09;
  const auto traj = syncoherence_demo(BlochState<double>(b, vec3(0.3, 0, 0)), RVector<double>(RVector<double>::Zero(3)), sc,
                                      profiles::saturating(D, 2), 20.0, 1e-3, 100);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double g = std::exp(2 * D * traj.times[i]);
    ASSERT_NEAR(traj.purity[i], p0 * g / (1 - p0 + p0 * g), 1e-9);
    if (i) {
      ASSERT_GE(traj.purity[i], traj.purity[i - 1]);
    }
    ASSERT_TRUE(traj.valid[i]);
    // radial growth: direction fixed
    ASSERT_NEAR(traj.states[i].rho()(1), 0.0, 1e-15);
  }
  EXPECT_LE(traj.copurity.back(), 1e-6);
}

TEST(Syncoherence, CutoffProfileAndUnitaryPart) {
  auto b = build_pauli_string_basis<double>(2);
  const auto sc = structure_constants(*b);
  Rng rng(10);
  const auto s = testing::random_state(b, rng, 0.0);
  const auto h = testing::random_operator(b, rng);
  const auto flat = syncoherence_demo(s, h.e(), sc, profiles::constant(0.0), 2.0, 1e-3, 100);
  for (double p : flat.purity) EXPECT_NEAR(p, flat.purity[0], 1e-9);
  const auto traj = syncoherence_demo(s, h.e(), sc, profiles::cutoff(0.5, 4), 10.0, 1e-3, 100);
  for (std::size_t i = 1; i < traj.size(); ++i) EXPECT_GE(traj.purity[i], traj.purity[i - 1] - 1e-12);
  EXPECT_NEAR(traj.purity.back(), 3.0, 5e-3);
  EXPECT_THROW(syncoherence_demo(s, h.e(), sc, profiles::constant(-0.1), 1.0, 1e-2), NegativeRateError);
}

TEST(Decoherence, PureSingletDecaysExponentially) {
  auto b = build_pauli_string_basis<double>(2);
  const auto sc = structure_constants(*b);
  const double D = -0.2;
  const auto traj = evolve_with_profile(maximally_anticorrelated_state(b, 1), RVector<double>(RVector<double>::Zero(15)), sc,
                                        profiles::constant(D), 5.0, 1e-3, 250);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    ASSERT_NEAR(traj.purity[i] / (3.0 * std::exp(2 * D * traj.times[i])), 1.0, 1e-9);
    ASSERT_TRUE(traj.valid[i]);
  }
}

TEST(Determinism, IdenticalInputsGiveIdenticalTrajectories) {
  Rng rng(11);
  auto b = build_pauli_string_basis<double>(2);
  const auto sc = structure_constants(*b);
  const auto s = testing::random_state(b, rng);
  const auto h = testing::random_operator(b, rng);
  const auto a = evolve_with_profile(s, h.e(), sc, profiles::saturating(0.3, 4), 1.0, 1e-3, 10);
  const auto c = evolve_with_profile(s, h.e(), sc, profiles::saturating(0.3, 4), 1.0, 1e-3, 10);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.states[i].rho(), c.states[i].rho());
}

TEST(LongDouble, PrecessionInExtendedPrecision) {
  auto b = build_pauli_string_basis<long double>(1);
  RVector<long double> h(3), r(3);
  h << 0, 0, 0.5L;
  r << 1, 0, 0;
  const auto traj = evolve_bloch(BlochState<long double>(b, r),
                                 hamiltonian_to_generator(h, structure_constants(*b)), 1.0L, 1e-3L, 1000);
  EXPECT_NEAR(static_cast<double>(traj.states.back().rho()(0)), std::cos(1.0), 1e-13);
}

}  // namespace
}  // namespace qemerge
