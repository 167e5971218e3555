#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace emlab {

enum class Boundary { periodic, reflecting };

// Uniform tensor grid in one or two coordinates.  Periodic axes place nodes
// at a + i*h with h = (b-a)/n (the right endpoint is the wrap image of the
// left); reflecting axes include both endpoints with h = (b-a)/(n-1).
struct GridSpec {
    int dim = 1;
    std::array<double, 2> min{0.0, 0.0};
    std::array<double, 2> max{1.0, 1.0};
    std::array<int, 2> res{64, 1};
    Boundary boundary = Boundary::reflecting;

    void validate() const;

    double spacing(int axis) const;
    double coord(int axis, int index) const;
    std::size_t size() const;
    std::size_t index(int i, int j = 0) const;

    // Quadrature weight of a node (trapezoid on reflecting axes, rectangle on
    // periodic axes), excluding the cell volume.
    double node_weight(int i, int j = 0) const;
    // Product of spacings.
    double cell_volume() const;
    // Quadrature of a nodal field.
    double integrate(const std::vector<double>& values) const;

    bool operator==(const GridSpec&) const = default;
};

}  // namespace emlab
