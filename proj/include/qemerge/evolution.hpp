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

#ifndef QEMERGE_EVOLUTION_HPP_
#define QEMERGE_EVOLUTION_HPP_

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "qemerge/core.hpp"
#include "qemerge/generator_basis.hpp"
#include "qemerge/observables.hpp"
#include "qemerge/quantum_state.hpp"

namespace qemerge {

/// Generator of the Bloch-space flow d(rho_k)/dt = T_kl rho_l + D rho_k.
/// When built from a Hamiltonian, T = -2 f H + residual.
template <typename Scalar>
struct EvolutionSpec {
  RMatrix<Scalar> T;
  Scalar D = 0;
  std::optional<RVector<Scalar>> hamiltonian;  // H_k
  RMatrix<Scalar> residual;                    // antisymmetric part outside SU(M)

  Index size() const noexcept { return T.rows(); }
};

template <typename Scalar>
Scalar antisymmetry_defect(const RMatrix<Scalar>& t) {
  return max_abs((t + t.transpose()).eval());
}

/// T_kl = -2 f_klm H_m.
template <typename Scalar>
RMatrix<Scalar> unitary_generator(const RVector<Scalar>& h, const StructureConstants<Scalar>& sc) {
  const Index n = sc.size();
  if (h.size() != n) throw DimensionError("Hamiltonian coefficient vector must have M^2 - 1 entries");
  RMatrix<Scalar> t = RMatrix<Scalar>::Zero(n, n);
  for (Index k = 0; k < n; ++k)
    for (Index l = 0; l < n; ++l)
      for (const auto& term : sc.terms(k, l)) t(k, l) -= Scalar(2) * term.f * h(term.m);
  return t;
}

template <typename Scalar>
EvolutionSpec<Scalar> hamiltonian_to_generator(const RVector<Scalar>& h, const StructureConstants<Scalar>& sc) {
  EvolutionSpec<Scalar> spec;
  spec.T = unitary_generator(h, sc);
  spec.hamiltonian = h;
  spec.residual = RMatrix<Scalar>::Zero(sc.size(), sc.size());
  return spec;
}

/// Full generator: Hamiltonian part, extra SO(n) rotation, and scaling rate.
template <typename Scalar>
EvolutionSpec<Scalar> make_evolution_spec(const RVector<Scalar>& h, const RMatrix<Scalar>& residual, Scalar D,
                                          const StructureConstants<Scalar>& sc) {
  EvolutionSpec<Scalar> spec = hamiltonian_to_generator(h, sc);
  if (residual.size() != 0) {
    if (residual.rows() != sc.size() || residual.cols() != sc.size())
      throw DimensionError("residual rotation must be (M^2 - 1) x (M^2 - 1)");
    if (antisymmetry_defect(residual) > Scalar(tol::kExact)) throw Error("residual rotation is not antisymmetric");
    spec.residual = residual;
    spec.T += residual;
  }
  spec.D = D;
  return spec;
}

/// Generator evaluated on the current state, for state-dependent H, R and D.
template <typename Scalar>
struct StepGenerator {
  RMatrix<Scalar> T;
  Scalar D = 0;
};

template <typename Scalar>
using GeneratorFn = std::function<StepGenerator<Scalar>(const RVector<Scalar>&)>;

/// Classical fourth-order Runge-Kutta step.
template <typename State, typename Scalar, typename F>
State rk4_step(const State& y, Scalar h, F&& f) {
  const State k1 = f(y);
  const Scalar half = h / Scalar(2);
  const State k2 = f((y + half * k1).eval());
  const State k3 = f((y + half * k2).eval());
  const State k4 = f((y + h * k3).eval());
  return (y + (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4)).eval();
}

template <typename Scalar>
struct Trajectory {
  std::vector<Scalar> times;
  std::vector<BlochState<Scalar>> states;
  std::vector<Scalar> purity;
  std::vector<Scalar> copurity;
  std::vector<bool> valid;  // positivity of the density matrix at each sample
  std::vector<CMatrix<Scalar>> matrices;  // filled by matrix-space integrators only

  std::size_t size() const noexcept { return times.size(); }
  bool all_valid() const { return std::all_of(valid.begin(), valid.end(), [](bool v) { return v; }); }
};

namespace detail {

struct StepPlan {
  long steps;
  double dt;
  double t_final;
};

template <typename Scalar>
StepPlan plan_steps(Scalar t_final, Scalar dt) {
  if (!(dt > Scalar(0))) throw std::invalid_argument("time step must be positive");
  if (!(t_final > Scalar(0))) throw std::invalid_argument("final time must be positive");
  const double ratio = static_cast<double>(t_final / dt);
  long steps = static_cast<long>(std::llround(ratio));
  if (std::abs(ratio - double(steps)) > 1e-9 * std::max(1.0, ratio)) steps = static_cast<long>(std::ceil(ratio));
  return {std::max(steps, 1L), static_cast<double>(dt), static_cast<double>(t_final)};
}

// Time at the end of step j; the last step absorbs any remainder.
template <typename Scalar>
Scalar step_time(const StepPlan& plan, long j) {
  return j == plan.steps ? Scalar(plan.t_final) : Scalar(j) * Scalar(plan.dt);
}

template <typename Scalar>
void record(Trajectory<Scalar>& traj, Scalar t, const BlochState<Scalar>& s, const CMatrix<Scalar>& rho) {
  traj.times.push_back(t);
  traj.states.push_back(s);
  traj.purity.push_back(purity(s));
  traj.copurity.push_back(copurity<Scalar>(rho));
  traj.valid.push_back(min_eigenvalue<Scalar>(rho) >= -Scalar(tol::kPositivity));
}

}  // namespace detail

/// Integrates the Bloch-space flow with a state-dependent generator.
/// Samples every `stride` steps plus the final time.
template <typename Scalar>
Trajectory<Scalar> evolve_bloch(const BlochState<Scalar>& s, const GeneratorFn<Scalar>& generator, Scalar t_final,
                                Scalar dt, long stride = 1) {
  const auto plan = detail::plan_steps(t_final, dt);
  stride = std::max(stride, 1L);
  Trajectory<Scalar> traj;
  RVector<Scalar> rho = s.rho();
  detail::record(traj, Scalar(0), s, assemble_density(s));
  auto rhs = [&](const RVector<Scalar>& y) -> RVector<Scalar> {
    const StepGenerator<Scalar> g = generator(y);
    return g.T * y + g.D * y;
  };
  for (long j = 1; j <= plan.steps; ++j) {
    const Scalar h = detail::step_time<Scalar>(plan, j) - detail::step_time<Scalar>(plan, j - 1);
    rho = rk4_step(rho, h, rhs);
    if (j % stride == 0 || j == plan.steps) {
      BlochState<Scalar> state(s.basis(), rho);
      detail::record(traj, detail::step_time<Scalar>(plan, j), state, assemble_density(state));
    }
  }
  return traj;
}

template <typename Scalar>
Trajectory<Scalar> evolve_bloch(const BlochState<Scalar>& s, const EvolutionSpec<Scalar>& spec, Scalar t_final,
                                Scalar dt, long stride = 1) {
  if (spec.size() != s.rho().size()) throw DimensionError("generator and state dimensions differ");
  if (antisymmetry_defect(spec.T) > Scalar(tol::kExact)) throw Error("rotation generator T is not antisymmetric");
  const StepGenerator<Scalar> fixed{spec.T, spec.D};
  return evolve_bloch<Scalar>(s, GeneratorFn<Scalar>([fixed](const RVector<Scalar>&) { return fixed; }), t_final,
                              dt, stride);
}

/// d(rho)/dt = -i [H, rho], integrated on the matrix itself.
template <typename Scalar>
Trajectory<Scalar> evolve_von_neumann(const DensityMatrix<Scalar>& rho0, const QuantumOperator<Scalar>& h,
                                      Scalar t_final, Scalar dt, long stride = 1) {
  if (rho0.dimension() != h.dimension()) throw DimensionError("state and Hamiltonian dimensions differ");
  const auto plan = detail::plan_steps(t_final, dt);
  stride = std::max(stride, 1L);
  const CMatrix<Scalar>& H = h.matrix();
  const Complex<Scalar> minus_i(0, -1);
  auto rhs = [&](const CMatrix<Scalar>& r) -> CMatrix<Scalar> { return minus_i * (H * r - r * H); };

  Trajectory<Scalar> traj;
  auto sample = [&](Scalar t, const CMatrix<Scalar>& r) {
    BlochState<Scalar> state = bloch_from_density(DensityMatrix<Scalar>(r), h.basis());
    detail::record(traj, t, state, r);
    traj.matrices.push_back(r);
  };
  CMatrix<Scalar> r = rho0.matrix();
  sample(Scalar(0), r);
  for (long j = 1; j <= plan.steps; ++j) {
    const Scalar step = detail::step_time<Scalar>(plan, j) - detail::step_time<Scalar>(plan, j - 1);
    r = rk4_step(r, step, rhs);
    if (j % stride == 0 || j == plan.steps) sample(detail::step_time<Scalar>(plan, j), r);
  }
  return traj;
}

template <typename Scalar>
struct WaveTrajectory {
  std::vector<Scalar> times;
  std::vector<CVector<Scalar>> states;
};

/// i d(psi)/dt = H psi.
template <typename Scalar>
WaveTrajectory<Scalar> evolve_schrodinger(const WaveFunction<Scalar>& psi0, const QuantumOperator<Scalar>& h,
                                          Scalar t_final, Scalar dt, long stride = 1) {
  if (psi0.dimension() != h.dimension()) throw DimensionError("wave function and Hamiltonian dimensions differ");
  const auto plan = detail::plan_steps(t_final, dt);
  stride = std::max(stride, 1L);
  const CMatrix<Scalar>& H = h.matrix();
  const Complex<Scalar> minus_i(0, -1);
  auto rhs = [&](const CVector<Scalar>& v) -> CVector<Scalar> { return minus_i * (H * v); };
  WaveTrajectory<Scalar> traj;
  CVector<Scalar> psi = psi0.vector();
  traj.times.push_back(Scalar(0));
  traj.states.push_back(psi);
  for (long j = 1; j <= plan.steps; ++j) {
    const Scalar step = detail::step_time<Scalar>(plan, j) - detail::step_time<Scalar>(plan, j - 1);
    psi = rk4_step(psi, step, rhs);
    if (j % stride == 0 || j == plan.steps) {
      traj.times.push_back(detail::step_time<Scalar>(plan, j));
      traj.states.push_back(psi);
    }
  }
  return traj;
}

template <typename Scalar>
struct EnergyLevel {
  Scalar energy;
  WaveFunction<Scalar> state;
};

/// Solutions of H psi = E psi, ascending in E, phase-fixed eigenvectors.
template <typename Scalar>
std::vector<EnergyLevel<Scalar>> energy_eigenstates(const QuantumOperator<Scalar>& h) {
  const auto eig = hermitian_eigen<Scalar>(h.matrix());
  std::vector<EnergyLevel<Scalar>> out;
  for (Index j = 0; j < eig.values.size(); ++j)
    out.push_back({eig.values(j), WaveFunction<Scalar>(eig.vectors.col(j).normalized())});
  return out;
}

/// exp(-beta H) / tr exp(-beta H), shifted by the ground energy for stability.
template <typename Scalar>
DensityMatrix<Scalar> boltzmann_state(const QuantumOperator<Scalar>& h, Scalar beta) {
  if (beta < Scalar(0)) throw std::invalid_argument("inverse temperature must be non-negative");
  const auto eig = hermitian_eigen<Scalar>(h.matrix());
  const Scalar ground = eig.values.minCoeff();
  RVector<Scalar> weights(eig.values.size());
  for (Index j = 0; j < weights.size(); ++j) weights(j) = std::exp(-beta * (eig.values(j) - ground));
  weights /= weights.sum();
  CMatrix<Scalar> rho = eig.vectors * weights.template cast<Complex<Scalar>>().asDiagonal() * eig.vectors.adjoint();
  return DensityMatrix<Scalar>((rho + rho.adjoint()) * Scalar(0.5));
}

/// Scaling rate D as a function of the current Bloch vector.
template <typename Scalar>
using RateProfile = std::function<Scalar(const RVector<Scalar>&)>;

namespace profiles {

template <typename Scalar>
RateProfile<Scalar> constant(Scalar rate) {
  return [rate](const RVector<Scalar>&) { return rate; };
}

/// rate * (1 - P/(M-1)), vanishing on the pure-state shell.
template <typename Scalar>
RateProfile<Scalar> saturating(Scalar rate, Index dimension) {
  const Scalar bound = Scalar(dimension - 1);
  return [rate, bound](const RVector<Scalar>& rho) {
    return rate * std::max(Scalar(0), Scalar(1) - rho.squaredNorm() / bound);
  };
}

/// rate until P reaches M-1, zero afterwards.
template <typename Scalar>
RateProfile<Scalar> cutoff(Scalar rate, Index dimension) {
  const Scalar bound = Scalar(dimension - 1);
  return [rate, bound](const RVector<Scalar>& rho) { return rho.squaredNorm() < bound ? rate : Scalar(0); };
}

}  // namespace profiles

/// Unitary rotation from H combined with a state-dependent scaling rate.
template <typename Scalar>
Trajectory<Scalar> evolve_with_profile(const BlochState<Scalar>& s, const RVector<Scalar>& h,
                                       const StructureConstants<Scalar>& sc, const RateProfile<Scalar>& rate,
                                       Scalar t_final, Scalar dt, long stride = 1) {
  const RMatrix<Scalar> T = unitary_generator(h, sc);
  return evolve_bloch<Scalar>(
      s, GeneratorFn<Scalar>([T, rate](const RVector<Scalar>& rho) { return StepGenerator<Scalar>{T, rate(rho)}; }),
      t_final, dt, stride);
}

class NegativeRateError : public Error {
 public:
  using Error::Error;
};

/// Approach to a pure state under a non-negative rate. Positivity is
/// monitored through Trajectory::valid rather than enforced.
template <typename Scalar>
Trajectory<Scalar> syncoherence_demo(const BlochState<Scalar>& s, const RVector<Scalar>& h,
                                     const StructureConstants<Scalar>& sc, const RateProfile<Scalar>& rate,
                                     Scalar t_final, Scalar dt, long stride = 1) {
  RateProfile<Scalar> checked = [rate](const RVector<Scalar>& rho) {
    const Scalar d = rate(rho);
    if (d < Scalar(0)) throw NegativeRateError("syncoherence needs a non-negative rate");
    return d;
  };
  return evolve_with_profile(s, h, sc, checked, t_final, dt, stride);
}

}  // namespace qemerge

#endif  // QEMERGE_EVOLUTION_HPP_
