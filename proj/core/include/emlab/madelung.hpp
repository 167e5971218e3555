#pragma once

#include "emlab/fields.hpp"
#include "emlab/quantum_algebra.hpp"

namespace emlab {

// One explicit RK4 step of the hydrodynamic pair
//   dp/dt = + d_k (u_k p)
//   du_j/dt = + u_k d_k u_j + (1/m) d_j ( V + Q ),
//   Q = -(hbar^2 / 2m) (laplacian sqrt(p)) / sqrt(p),
// the fluid form matched to schrodinger_step through
// Psi = sqrt(p) exp(-i Ftilde / hbar) with u = (1/m) dFtilde/dq (the sign of
// the advection terms follows from that phase convention).  Central stencils;
// conservative on periodic grids.  Throws NodeError when p falls below
// `positivity_floor` and StabilityError when dt exceeds the dispersive CFL
// bound.
struct MadelungState {
    DensityField p;
    VelocityField u;
};

MadelungState madelung_step(const MadelungState& state,
                            const std::vector<double>& V,
                            const QuantumParams& qp, double dt,
                            double c_stab = 0.8,
                            double positivity_floor = 1e-250);

// Largest dt admitted by the RK4 stability region for the current state.
double madelung_stable_dt(const MadelungState& state, const QuantumParams& qp,
                          double c_stab = 0.8);

// Quantum potential field of a density.
std::vector<double> quantum_potential(const DensityField& p,
                                      const QuantumParams& qp,
                                      double positivity_floor = 1e-250);

MadelungState madelung_run(const MadelungState& state,
                           const std::vector<double>& V,
                           const QuantumParams& qp, double dt, long n_steps,
                           double c_stab = 0.8,
                           double positivity_floor = 1e-250);

// Advances the state by exactly `duration`, re-deriving the step from the
// stability bound as the flow speeds up.  `safety` is the fraction of the
// bound actually taken.
MadelungState madelung_run_adaptive(const MadelungState& state,
                                    const std::vector<double>& V,
                                    const QuantumParams& qp, double duration,
                                    double safety = 0.5, double c_stab = 0.8,
                                    double positivity_floor = 1e-250);

}  // namespace emlab
