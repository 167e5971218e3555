#include "emlab/fields.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "emlab/errors.hpp"

namespace emlab {

std::vector<double> PotentialSpec::sample(const GridSpec& grid) const {
    std::vector<double> v(grid.size(), 0.0);
    if (!evaluate) return v;
    const int nj = grid.dim == 2 ? grid.res[1] : 1;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < grid.res[0]; ++i)
            v[grid.index(i, j)] =
                evaluate(grid.coord(0, i), grid.dim == 2 ? grid.coord(1, j) : 0.0);
    return v;
}

double total_mass(const DensityField& p) { return p.grid.integrate(p.values); }

void normalize(DensityField& p) {
    const double m = total_mass(p);
    if (!std::isfinite(m) || m <= 0.0)
        throw NumericError("normalize: field mass is not positive");
    for (double& v : p.values) v /= m;
}

double compare_densities(const DensityField& a, const DensityField& b) {
    if (!(a.grid == b.grid))
        throw ConfigError("compare_densities: grids do not match");
    std::vector<double> diff(a.values.size());
    for (std::size_t k = 0; k < diff.size(); ++k)
        diff[k] = std::abs(a.values[k] - b.values[k]);
    return a.grid.integrate(diff);
}

double shannon_entropy(const DensityField& p, double p_min) {
    std::vector<double> integrand(p.values.size());
    for (std::size_t k = 0; k < integrand.size(); ++k) {
        const double v = p.values[k];
        integrand[k] = -v * std::log(std::max(v, p_min));
    }
    return p.grid.integrate(integrand);
}

std::vector<double> gradient_axis(const GridSpec& grid,
                                  const std::vector<double>& values, int axis) {
    if (values.size() != grid.size())
        throw ConfigError("gradient_axis: field size does not match grid");
    std::vector<double> out(values.size(), 0.0);
    const double h = grid.spacing(axis);
    const int ni = grid.res[0];
    const int nj = grid.dim == 2 ? grid.res[1] : 1;
    const int n = axis == 0 ? ni : nj;
    if (grid.dim == 1 && axis != 0)
        throw ConfigError("gradient_axis: axis out of range");

    auto at = [&](int i, int j) { return values[grid.index(i, j)]; };
    for (int j = 0; j < nj; ++j) {
        for (int i = 0; i < ni; ++i) {
            const int c = axis == 0 ? i : j;
            double d;
            if (grid.boundary == Boundary::periodic) {
                const int cp = (c + 1) % n;
                const int cm = (c + n - 1) % n;
                d = axis == 0 ? (at(cp, j) - at(cm, j)) : (at(i, cp) - at(i, cm));
                d /= 2.0 * h;
            } else if (c == 0) {
                d = axis == 0
                        ? (-3.0 * at(0, j) + 4.0 * at(1, j) - at(2, j))
                        : (-3.0 * at(i, 0) + 4.0 * at(i, 1) - at(i, 2));
                d /= 2.0 * h;
            } else if (c == n - 1) {
                d = axis == 0 ? (3.0 * at(n - 1, j) - 4.0 * at(n - 2, j) +
                                 at(n - 3, j))
                              : (3.0 * at(i, n - 1) - 4.0 * at(i, n - 2) +
                                 at(i, n - 3));
                d /= 2.0 * h;
            } else {
                d = axis == 0 ? (at(c + 1, j) - at(c - 1, j))
                              : (at(i, c + 1) - at(i, c - 1));
                d /= 2.0 * h;
            }
            out[grid.index(i, j)] = d;
        }
    }
    return out;
}

double density_variance(const DensityField& p) {
    if (p.grid.dim != 1)
        throw ConfigError("density_variance: 1D densities only");
    std::vector<double> qp(p.values.size());
    for (int i = 0; i < p.grid.res[0]; ++i)
        qp[i] = p.grid.coord(0, i) * p.values[i];
    const double mean = p.grid.integrate(qp);
    for (int i = 0; i < p.grid.res[0]; ++i) {
        const double d = p.grid.coord(0, i) - mean;
        qp[i] = d * d * p.values[i];
    }
    return p.grid.integrate(qp);
}

namespace {

void write_csv_header(std::ofstream& out, const GridSpec& grid,
                      const char* value_cols) {
    out << (grid.dim == 2 ? "q1,q2," : "q,") << value_cols << "\n";
}

}  // namespace

void write_density_csv(const DensityField& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out.precision(17);
    write_csv_header(out, p.grid, "p");
    const int nj = p.grid.dim == 2 ? p.grid.res[1] : 1;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < p.grid.res[0]; ++i) {
            out << p.grid.coord(0, i);
            if (p.grid.dim == 2) out << ',' << p.grid.coord(1, j);
            out << ',' << p.values[p.grid.index(i, j)] << "\n";
        }
}

void write_wavefield_csv(const WaveField& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out.precision(17);
    write_csv_header(out, w.grid, "re,im");
    const int nj = w.grid.dim == 2 ? w.grid.res[1] : 1;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < w.grid.res[0]; ++i) {
            const auto z = w.values[w.grid.index(i, j)];
            out << w.grid.coord(0, i);
            if (w.grid.dim == 2) out << ',' << w.grid.coord(1, j);
            out << ',' << z.real() << ',' << z.imag() << "\n";
        }
}

}  // namespace emlab
