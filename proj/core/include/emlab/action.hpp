#pragma once

#include <vector>

#include "emlab/fields.hpp"

namespace emlab {

struct ActionResult {
    // Expanded form: integrand
    //   p [ D (d log p)^2 + gamma (d log p)(dF) + alpha gamma (dF)^2
    //       - alpha dF/dt + alpha V ].
    double expanded = 0.0;
    // Completed-square form: integrand
    //   p [ (D - gamma/4alpha) (d log p)^2 + alpha gamma (dFtilde)^2
    //       - alpha dFtilde/dt + alpha V ],
    // with Ftilde = F + log(p)/(2 alpha).
    double completed_square = 0.0;
    // Nodes where p fell below the evaluation floor and log p was clamped.
    long floored_nodes = 0;
};

// Evaluates both printed forms of the learning action on a time series of
// (p, Ftilde) slices.  Slices share one grid; times come from the density
// fields and must increase strictly.  Each density slice is renormalized to
// unit mass before evaluation (the completed-square step assumes probability
// conservation).  The two results agree to rounding for any smooth inputs;
// returning both makes that identity checkable.
ActionResult action_functional(const std::vector<DensityField>& p_series,
                               const std::vector<std::vector<double>>& ftilde_series,
                               const PotentialSpec& pot, double alpha,
                               double diffusion, double gamma,
                               double p_floor = 1e-30);

}  // namespace emlab
