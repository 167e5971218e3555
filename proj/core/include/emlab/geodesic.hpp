#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "emlab/christoffel.hpp"
#include "emlab/spacetime_metric.hpp"

namespace emlab {

struct GeodesicPath {
    // coordinate time or proper time, depending on the integrator
    std::vector<double> params;
    std::vector<Eigen::Vector4d> positions;
    std::vector<Eigen::Vector4d> velocities;  // dx/dparam
    bool proper_parameterized = false;
    bool exited = false;
    // worst |g(u,u) - g(u0,u0)| along the run (proper parameterization)
    double max_norm_drift = 0.0;
    long n_steps = 0;
};

// Multilinear metric interpolation; false outside the usable region.
bool sample_metric(const SpacetimeMetric& sm, const double x[4],
                   Eigen::Matrix4d& g_out);

// Coordinate-time form: x^0 = t, and the three spatial components follow
//   d2x^mu/dt2 = (G^0_ab dx^mu/dt - G^mu_ab) dx^a/dt dx^b/dt.
// RK4 with fixed dt; the path truncates with `exited` set when the stencil
// support ends.
GeodesicPath geodesic_integrate(const ChristoffelField& cf,
                                const Eigen::Vector4d& x0,
                                const Eigen::Vector3d& v0, double duration,
                                double dt);

// Proper-time form d2x^mu/dtau2 = -G^mu_ab u^a u^b, starting from the
// normalized timelike version of (1, v0).  Runs until coordinate time has
// advanced by `duration`.
GeodesicPath geodesic_integrate_proper(const ChristoffelField& cf,
                                       const SpacetimeMetric& sm,
                                       const Eigen::Vector4d& x0,
                                       const Eigen::Vector3d& v0,
                                       double duration, double dtau);

// Line-element quadrature over a polygonal event path: sum of
// sqrt(-g(mid) dx dx) per segment.  Throws DomainError naming the first
// spacelike segment.
double proper_time(const SpacetimeMetric& sm,
                   const std::vector<Eigen::Vector4d>& positions);

// Endpoint-fixed C1 spatial perturbation of a path, built from a few sine
// half-waves with coefficients drawn from the seed.
std::vector<Eigen::Vector4d> perturb_path(
    const std::vector<Eigen::Vector4d>& base, std::uint64_t seed,
    double amplitude);

}  // namespace emlab
