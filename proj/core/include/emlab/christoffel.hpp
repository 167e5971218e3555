#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "emlab/spacetime_metric.hpp"

namespace emlab {

// Connection coefficients on a Grid4, symmetric pair (alpha, beta) stored
// once.  A node is flagged when a required central stencil is unavailable
// (non-periodic boundary, or a flagged metric neighbor); frozen axes
// contribute zero derivatives and never flag.
class ChristoffelField {
  public:
    Grid4 grid;
    std::vector<double> coeffs;  // node-major, 4 x 10 per node
    std::vector<std::uint8_t> flagged;

    static int pair_index(int a, int b);
    double at(std::size_t node, int mu, int a, int b) const;
    double& slot(std::size_t node, int mu, int pair);
    double slot(std::size_t node, int mu, int pair) const;

    // Multilinear sample at an arbitrary event; wraps periodic axes, clamps
    // frozen ones.  Returns false when the stencil touches a flagged node or
    // leaves a non-periodic axis.
    bool sample(const double x[4], std::array<double, 160>& out) const;

    std::size_t n_flagged() const;
    double max_abs() const;
};

ChristoffelField christoffel(const SpacetimeMetric& sm);

// Central derivative of a per-node scalar along one axis; false when
// unavailable.  Shared by the curvature and action code.
bool central_derivative(const Grid4& grid, const std::vector<double>& values,
                        const std::vector<std::uint8_t>& flagged,
                        const int c[4], int axis, double& out);

}  // namespace emlab
