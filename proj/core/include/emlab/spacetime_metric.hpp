#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "emlab/spacetime_field.hpp"

namespace emlab {

// Four-axis box, axis 0 being global time.  Periodic axes wrap their
// stencils; non-periodic axes include both endpoints and lose their boundary
// nodes to flagging wherever a derivative is required.  An axis with a single
// node is treated as frozen: derivatives along it vanish and integration
// multiplies by the extent.
struct Grid4 {
    double min[4] = {0.0, 0.0, 0.0, 0.0};
    double max[4] = {1.0, 1.0, 1.0, 1.0};
    int res[4] = {1, 16, 16, 16};
    bool periodic[4] = {true, true, true, true};

    void validate() const;
    double spacing(int axis) const;
    double coord(int axis, int i) const;
    std::size_t size() const;
    std::size_t index(int i, int j, int k, int l) const;
    void unpack(std::size_t node, int out[4]) const;
    // Integration weight of one node along one axis.
    double axis_weight(int axis, int i) const;
    double node_weight(const int c[4]) const;
    double integrate(const std::vector<double>& values) const;
    bool operator==(const Grid4&) const = default;
};

struct SpacetimeMetric {
    Grid4 grid;
    std::vector<Eigen::Matrix4d> g;
    std::vector<Eigen::Matrix4d> g_inv;
    std::vector<double> sqrt_minus_g;
    // Nodes carrying no usable data (for example vacuum nodes of a stacked
    // ensemble field).  Stencil availability is derived downstream.
    std::vector<std::uint8_t> flagged;

    void validate() const;
};

SpacetimeMetric flat_spacetime(const Grid4& grid);

// g = diag(-1, t^2, t^2, t^2); needs min time > 0 on a non-periodic time
// axis.
SpacetimeMetric frw_spacetime(const Grid4& grid);

// Synchronous metric with spatial block delta_ab + epsilon h_ab(x), h built
// from sine modes with integer wavenumbers on the periodic axes, entries
// bounded so the block stays SPD for epsilon < ~0.3.  Mode shapes depend on
// (seed, mode) only.
SpacetimeMetric weak_field_spacetime(const Grid4& grid, double epsilon,
                                     int n_modes, std::uint64_t seed,
                                     bool time_dependent = false,
                                     int max_wavenumber = 2);

// g_ab = exp(2 c x^1) delta_ab.
SpacetimeMetric conformal_spacetime(const Grid4& grid, double c);

// g_ab = (1 + 2 c x^1) delta_ab; the weak-field slab used for geodesic force
// checks.
SpacetimeMetric slab_spacetime(const Grid4& grid, double c);

// Stacks ensemble-built spatial slices along a uniform time axis.  The slice
// density {sqrt g_i} supplies sqrt_minus_g; empty nodes propagate to flags.
SpacetimeMetric stack_slices(const std::vector<MetricField>& slices,
                             double tmin, double dt);

}  // namespace emlab
