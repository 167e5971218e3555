#pragma once

#include "emlab/fields.hpp"

namespace emlab {

// One Crank-Nicolson step of
//   i hbar dPsi/dt = -(hbar^2 / 2 m) laplacian Psi + V Psi.
// The kinetic update solves (I + i dt H / 2 hbar) Psi' = (I - i dt H / 2 hbar) Psi
// per axis; in 2D the potential is applied as exact half-step phases around
// the axis sweeps (Strang).  Each factor is unitary in the grid quadrature
// norm, so the step preserves the norm to rounding.  Periodic axes use a
// cyclic solve; reflecting axes use a zero-derivative (hard-wall-free)
// closure that is self-adjoint under the trapezoid weights.
WaveField schrodinger_step(const WaveField& w, const std::vector<double>& V,
                           double dt);

// Quadrature norm integral |Psi|^2 dq.
double wave_norm(const WaveField& w);

// |Psi|^2 as a density field (not renormalized).
DensityField wave_density(const WaveField& w);

// Advance n steps with a fixed nodal potential.
WaveField schrodinger_run(const WaveField& w, const std::vector<double>& V,
                          double dt, long n_steps);

}  // namespace emlab
