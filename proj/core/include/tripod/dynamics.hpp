#pragma once

#include "tripod/atomic_model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace tripod {

/// Single-atom density matrix over the scheme states.
using DensityMatrix = ComplexMatrix;

/// Half of the atoms in each of the two outer ground states, no coherences.
/// tripod4: |g->, |g+>; zeeman8: m_F = -2, +2.
DensityMatrix polariton_vacuum(const LevelScheme& scheme);

DensityMatrix lindblad_rhs(const DensityMatrix& rho, const HamiltonianMatrix& h,
                           std::span<const JumpOperator> jumps);

/// One RK4 step with constant H. Throws NumericalError when the result has an
/// eigenvalue below -1e-6 (dt too large).
DensityMatrix step(const DensityMatrix& rho, const HamiltonianMatrix& h, std::span<const JumpOperator> jumps,
                   double dt);

/// One RK4 step with H(t) sampled at t, t + dt/2, t + dt.
DensityMatrix step(const DensityMatrix& rho, const std::function<HamiltonianMatrix(double)>& h_of_t, double t,
                   std::span<const JumpOperator> jumps, double dt);

/// Column-stacked Liouvillian superoperator: vec(d rho/dt) = L vec(rho).
ComplexMatrix liouvillian(const HamiltonianMatrix& h, std::span<const JumpOperator> jumps);

/// rho(t) = exp(L t) rho(0) for constant H. Intended for small systems.
DensityMatrix exact_evolve(const DensityMatrix& rho, const HamiltonianMatrix& h,
                           std::span<const JumpOperator> jumps, double t);

/// Stationary state of L. Throws NumericalError when the stationary space is
/// degenerate; add tie_break_jumps() to select a state.
DensityMatrix steady_state(const HamiltonianMatrix& h, std::span<const JumpOperator> jumps);

/// Weak incoherent transfer that makes the stationary state unique: ground
/// states outside the polariton vacuum are pumped into it at `rate`, and the
/// two vacuum states exchange population at `rate`.
std::vector<JumpOperator> tie_break_jumps(const LevelScheme& scheme, double rate);

/// steady_state with the tie-break regulariser appended.
DensityMatrix steady_state(const LevelScheme& scheme, const HamiltonianMatrix& h,
                           std::span<const JumpOperator> jumps, double tie_break_rate);

double min_eigenvalue(const DensityMatrix& rho);
double hermiticity_error(const ComplexMatrix& m);

}  // namespace tripod
