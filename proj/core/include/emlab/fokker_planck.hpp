#pragma once

#include <vector>

#include "emlab/fields.hpp"
#include "emlab/quantum_algebra.hpp"

namespace emlab {

// One explicit conservative-flux step of
//   dp/dt = sum_k d_k ( D d_k p + gamma (d_k F) p ).
// Face fluxes are differenced so mass is conserved to rounding; reflecting
// boundaries impose zero flux, periodic boundaries wrap.  The step is
// rejected (StabilityError, with a suggested dt) when dt > c_stab dx^2 / D or
// when the drift would move mass more than c_stab of a cell per step.
DensityField fp_step(const DensityField& p, const std::vector<double>& F,
                     const LearningParams& lp, double c_stab = 0.25);

// Largest admissible dt for the stability bounds above.
double fp_stable_dt(const GridSpec& grid, const std::vector<double>& F,
                    const LearningParams& lp, double c_stab = 0.25);

// Stationary law p = exp(-(gamma/D) F) / Z on the grid.
DensityField fp_stationary(const GridSpec& grid, const std::vector<double>& F,
                           const LearningParams& lp);

}  // namespace emlab
