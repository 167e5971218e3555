#include "emlab/spacetime_metric.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "emlab/errors.hpp"
#include "emlab/rng.hpp"

namespace emlab {

void Grid4::validate() const {
    for (int a = 0; a < 4; ++a) {
        if (res[a] < 1)
            throw ConfigError("grid axis " + std::to_string(a) +
                              " needs at least 1 node");
        if (!(max[a] > min[a]))
            throw ConfigError("grid axis " + std::to_string(a) +
                              " has non-positive extent");
        if (res[a] == 1) continue;
        if (!periodic[a] && res[a] < 2)
            throw ConfigError("grid axis " + std::to_string(a) +
                              " too small");
    }
}

double Grid4::spacing(int axis) const {
    if (res[axis] == 1) return max[axis] - min[axis];
    if (periodic[axis]) return (max[axis] - min[axis]) / res[axis];
    return (max[axis] - min[axis]) / (res[axis] - 1);
}

double Grid4::coord(int axis, int i) const {
    return min[axis] + spacing(axis) * i;
}

std::size_t Grid4::size() const {
    return static_cast<std::size_t>(res[0]) * res[1] * res[2] * res[3];
}

std::size_t Grid4::index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * res[1] + j) * res[2] + k) * res[3] +
           l;
}

void Grid4::unpack(std::size_t node, int out[4]) const {
    out[3] = static_cast<int>(node % res[3]);
    node /= res[3];
    out[2] = static_cast<int>(node % res[2]);
    node /= res[2];
    out[1] = static_cast<int>(node % res[1]);
    out[0] = static_cast<int>(node / res[1]);
}

double Grid4::axis_weight(int axis, int i) const {
    if (res[axis] == 1) return max[axis] - min[axis];
    const double h = spacing(axis);
    if (periodic[axis]) return h;
    return (i == 0 || i == res[axis] - 1) ? 0.5 * h : h;
}

double Grid4::node_weight(const int c[4]) const {
    double w = 1.0;
    for (int a = 0; a < 4; ++a) w *= axis_weight(a, c[a]);
    return w;
}

double Grid4::integrate(const std::vector<double>& values) const {
    if (values.size() != size())
        throw ConfigError("integrate: " + std::to_string(values.size()) +
                          " values on a grid of " + std::to_string(size()));
    double total = 0.0;
    int c[4];
    for (std::size_t node = 0; node < values.size(); ++node) {
        unpack(node, c);
        total += values[node] * node_weight(c);
    }
    return total;
}

void SpacetimeMetric::validate() const {
    grid.validate();
    const std::size_t n = grid.size();
    if (g.size() != n || g_inv.size() != n || sqrt_minus_g.size() != n ||
        flagged.size() != n)
        throw ConfigError("metric arrays do not match the grid size");
}

namespace {

SpacetimeMetric alloc_metric(const Grid4& grid) {
    grid.validate();
    SpacetimeMetric sm;
    sm.grid = grid;
    const std::size_t n = grid.size();
    sm.g.assign(n, Eigen::Matrix4d::Zero());
    sm.g_inv.assign(n, Eigen::Matrix4d::Zero());
    sm.sqrt_minus_g.assign(n, 0.0);
    sm.flagged.assign(n, 0);
    return sm;
}

SpacetimeMetric from_spatial_block(
    const Grid4& grid,
    const std::function<Eigen::Matrix3d(const double x[4])>& block) {
    SpacetimeMetric sm = alloc_metric(grid);
    int c[4];
    double x[4];
    for (std::size_t node = 0; node < grid.size(); ++node) {
        grid.unpack(node, c);
        for (int a = 0; a < 4; ++a) x[a] = grid.coord(a, c[a]);
        const Eigen::Matrix3d s = block(x);
        Eigen::Matrix4d gm = Eigen::Matrix4d::Zero();
        gm(0, 0) = -1.0;
        gm.block<3, 3>(1, 1) = s;
        Eigen::Matrix4d gi = Eigen::Matrix4d::Zero();
        gi(0, 0) = -1.0;
        gi.block<3, 3>(1, 1) = s.inverse();
        const double det = s.determinant();
        if (!(det > 0.0))
            throw ConfigError(
                "spatial block determinant is not positive at a node");
        sm.g[node] = gm;
        sm.g_inv[node] = gi;
        sm.sqrt_minus_g[node] = std::sqrt(det);
    }
    return sm;
}

}  // namespace

SpacetimeMetric flat_spacetime(const Grid4& grid) {
    return from_spatial_block(
        grid, [](const double*) { return Eigen::Matrix3d::Identity(); });
}

SpacetimeMetric frw_spacetime(const Grid4& grid) {
    if (grid.res[0] > 1 && grid.periodic[0])
        throw ConfigError("expanding metric needs a non-periodic time axis");
    if (!(grid.min[0] > 0.0))
        throw ConfigError("expanding metric needs min time > 0");
    return from_spatial_block(grid, [](const double x[4]) {
        return Eigen::Matrix3d(x[0] * x[0] * Eigen::Matrix3d::Identity());
    });
}

SpacetimeMetric weak_field_spacetime(const Grid4& grid, double epsilon,
                                     int n_modes, std::uint64_t seed,
                                     bool time_dependent, int max_wavenumber) {
    if (n_modes < 1) throw ConfigError("need at least one mode");
    if (max_wavenumber < 1) throw ConfigError("max wavenumber must be >= 1");
    struct Mode {
        Eigen::Matrix3d amp;
        double kf[4];
        double phase;
    };
    std::vector<Mode> modes(n_modes);
    for (int m = 0; m < n_modes; ++m) {
        RngStream rng(seed, static_cast<std::uint64_t>(m));
        Mode& mode = modes[m];
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                mode.amp(a, b) = (2.0 * rng.uniform() - 1.0) / n_modes;
                mode.amp(b, a) = mode.amp(a, b);
            }
        for (int a = 0; a < 4; ++a) {
            if (a == 0 && (!time_dependent || grid.res[0] == 1)) {
                mode.kf[a] = 0.0;
                continue;
            }
            const int kint =
                1 + static_cast<int>(rng.uniform_index(
                        static_cast<std::uint64_t>(max_wavenumber)));
            mode.kf[a] = 2.0 * 3.14159265358979323846 * kint /
                         (grid.max[a] - grid.min[a]);
        }
        mode.phase = 2.0 * 3.14159265358979323846 * rng.uniform();
    }
    return from_spatial_block(grid, [&](const double x[4]) {
        Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
        for (const Mode& mode : modes) {
            double arg = mode.phase;
            for (int a = 0; a < 4; ++a)
                arg += mode.kf[a] * (x[a] - grid.min[a]);
            h += mode.amp * std::sin(arg);
        }
        return Eigen::Matrix3d(Eigen::Matrix3d::Identity() + epsilon * h);
    });
}

SpacetimeMetric conformal_spacetime(const Grid4& grid, double c) {
    return from_spatial_block(grid, [c](const double x[4]) {
        return Eigen::Matrix3d(std::exp(2.0 * c * x[1]) *
                               Eigen::Matrix3d::Identity());
    });
}

SpacetimeMetric slab_spacetime(const Grid4& grid, double c) {
    return from_spatial_block(grid, [c](const double x[4]) {
        const double factor = 1.0 + 2.0 * c * x[1];
        if (!(factor > 0.0))
            throw ConfigError("slab potential makes the metric degenerate "
                              "inside the box");
        return Eigen::Matrix3d(factor * Eigen::Matrix3d::Identity());
    });
}

SpacetimeMetric stack_slices(const std::vector<MetricField>& slices,
                             double tmin, double dt) {
    if (slices.empty()) throw ConfigError("stack_slices: no slices");
    if (!(dt > 0.0)) throw ConfigError("stack_slices: dt must be positive");
    const SpatialGrid& sg = slices.front().grid;
    for (std::size_t s = 1; s < slices.size(); ++s) {
        const SpatialGrid& other = slices[s].grid;
        for (int a = 0; a < 3; ++a)
            if (other.min[a] != sg.min[a] || other.max[a] != sg.max[a] ||
                other.res[a] != sg.res[a])
                throw ConfigError("stack_slices: slice " + std::to_string(s) +
                                  " grid differs from the first slice");
    }
    Grid4 grid;
    grid.min[0] = tmin;
    grid.max[0] = tmin + dt * (slices.size() == 1
                                   ? 1.0
                                   : static_cast<double>(slices.size() - 1));
    grid.res[0] = static_cast<int>(slices.size());
    grid.periodic[0] = false;
    for (int a = 0; a < 3; ++a) {
        grid.min[a + 1] = sg.min[a];
        grid.max[a + 1] = sg.max[a];
        grid.res[a + 1] = sg.res[a];
        grid.periodic[a + 1] = false;
    }
    SpacetimeMetric sm = alloc_metric(grid);
    for (int s = 0; s < grid.res[0]; ++s) {
        const MetricField& mf = slices[s];
        for (int i = 0; i < sg.res[0]; ++i)
            for (int j = 0; j < sg.res[1]; ++j)
                for (int k = 0; k < sg.res[2]; ++k) {
                    const std::size_t src = sg.index(i, j, k);
                    const std::size_t dst = grid.index(s, i, j, k);
                    sm.g[dst] = mf.g[src];
                    sm.g_inv[dst] = mf.g_inv[src];
                    sm.sqrt_minus_g[dst] = mf.sqrt_minus_g[src];
                    sm.flagged[dst] = mf.empty[src];
                }
    }
    return sm;
}

}  // namespace emlab
