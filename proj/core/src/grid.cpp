#include "emlab/grid.hpp"

#include "emlab/errors.hpp"

namespace emlab {

void GridSpec::validate() const {
    if (dim < 1 || dim > 2) throw ConfigError("grid.dim: must be 1 or 2");
    for (int a = 0; a < dim; ++a) {
        if (res[a] < 16)
            throw ConfigError("grid.res: at least 16 nodes per axis required");
        if (!(max[a] > min[a]))
            throw ConfigError("grid.extent: max must exceed min");
    }
}

double GridSpec::spacing(int axis) const {
    const double len = max[axis] - min[axis];
    return boundary == Boundary::periodic ? len / res[axis]
                                          : len / (res[axis] - 1);
}

double GridSpec::coord(int axis, int index) const {
    return min[axis] + spacing(axis) * index;
}

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(res[a]);
    return n;
}

std::size_t GridSpec::index(int i, int j) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(res[0]) * static_cast<std::size_t>(j);
}

double GridSpec::node_weight(int i, int j) const {
    if (boundary == Boundary::periodic) return 1.0;
    double w = (i == 0 || i == res[0] - 1) ? 0.5 : 1.0;
    if (dim == 2) w *= (j == 0 || j == res[1] - 1) ? 0.5 : 1.0;
    return w;
}

double GridSpec::cell_volume() const {
    double v = spacing(0);
    if (dim == 2) v *= spacing(1);
    return v;
}

double GridSpec::integrate(const std::vector<double>& values) const {
    if (values.size() != size())
        throw ConfigError("integrate: field size does not match grid");
    double acc = 0.0;
    const int nj = dim == 2 ? res[1] : 1;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < res[0]; ++i)
            acc += node_weight(i, j) * values[index(i, j)];
    return acc * cell_volume();
}

}  // namespace emlab
