#pragma once

#include <cstdint>
#include <vector>

#include "emlab/spacetime_field.hpp"

namespace emlab {

struct InteractionReport {
    // Integrand of the interaction entropy on the spatial grid:
    //   -{ g_{i,ab} <xdd^a> x^b sqrt(g_i) }.
    std::vector<double> field;
    double total = 0.0;  // quadrature of `field`
    // |quadrature of the connection-weighted production expression|; near
    // equilibrium this should be small, and it vanishes identically when all
    // neurons share one window matrix.
    double balance_residual = 0.0;
    // Worst relative error of empirical spatial velocity second moments
    // against (g_i^{ab} + g^{ab}(x_i)) / 2.
    double moment_error = 0.0;
    long n_samples = 0;
};

// Monte Carlo evaluation of the interaction entropy production of an
// ensemble against its own averaged metric field.  Velocities are zero-mean
// Gaussians with the prescribed covariance; the clock component of every
// four-velocity is fixed to 1.
InteractionReport interaction_entropy(const NeuronEnsemble& ens,
                                      const MetricField& mf, long n_samples,
                                      std::uint64_t seed);

}  // namespace emlab
