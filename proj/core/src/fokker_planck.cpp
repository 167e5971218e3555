#include "emlab/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "emlab/errors.hpp"

namespace emlab {

namespace {

// Gradient of F at the face between nodes c and c+1 along `axis`.
struct FaceDrift {
    // drift[axis][face index in flattened order]
    std::vector<std::vector<double>> values;
};

double max_abs_face_drift(const GridSpec& grid, const std::vector<double>& F,
                          int axis) {
    const double h = grid.spacing(axis);
    const int ni = grid.res[0];
    const int nj = grid.dim == 2 ? grid.res[1] : 1;
    const int n = axis == 0 ? ni : nj;
    double m = 0.0;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i) {
            const int c = axis == 0 ? i : j;
            if (c == n - 1 && grid.boundary != Boundary::periodic) continue;
            const int cp = (c + 1) % n;
            const double fp = axis == 0 ? F[grid.index(cp, j)] : F[grid.index(i, cp)];
            const double fc = F[grid.index(i, j)];
            m = std::max(m, std::abs((fp - fc) / h));
        }
    return m;
}

}  // namespace

double fp_stable_dt(const GridSpec& grid, const std::vector<double>& F,
                    const LearningParams& lp, double c_stab) {
    double dt = std::numeric_limits<double>::infinity();
    for (int a = 0; a < grid.dim; ++a) {
        const double h = grid.spacing(a);
        if (lp.diffusion > 0.0)
            dt = std::min(dt, c_stab * h * h / lp.diffusion);
        const double vmax = std::abs(lp.gamma) * max_abs_face_drift(grid, F, a);
        if (vmax > 0.0) dt = std::min(dt, c_stab * h / vmax);
    }
    return dt;
}

DensityField fp_step(const DensityField& p, const std::vector<double>& F,
                     const LearningParams& lp, double c_stab) {
    p.grid.validate();
    if (F.size() != p.grid.size())
        throw ConfigError("fp_step: F size does not match grid");
    const double dt_max = fp_stable_dt(p.grid, F, lp, c_stab);
    if (lp.dt > dt_max) {
        std::ostringstream msg;
        msg << "fp_step: dt = " << lp.dt << " violates the stability bound; "
            << "use dt <= " << dt_max;
        throw StabilityError(msg.str(), dt_max);
    }

    const GridSpec& g = p.grid;
    DensityField out = p;
    out.time = p.time + lp.dt;
    const int ni = g.res[0];
    const int nj = g.dim == 2 ? g.res[1] : 1;

    for (int axis = 0; axis < g.dim; ++axis) {
        const double h = g.spacing(axis);
        const int n = axis == 0 ? ni : nj;
        // Net divergence of the face flux
        //   G_{c+1/2} = D (p_{c+1} - p_c)/h + gamma F'_{c+1/2} (p_{c+1}+p_c)/2
        // accumulated into out.values; each face contributes once to both of
        // its neighbor cells, which is what conserves total mass.  End nodes
        // of reflecting axes own half-width cells (their trapezoid weight),
        // so their updates carry 1/w.
        auto axis_weight = [&](int c) {
            return (g.boundary == Boundary::reflecting && (c == 0 || c == n - 1))
                       ? 0.5
                       : 1.0;
        };
        for (int j = 0; j < nj; ++j) {
            for (int i = 0; i < ni; ++i) {
                const int c = axis == 0 ? i : j;
                if (c == n - 1 && g.boundary != Boundary::periodic) continue;
                const int cp = (c + 1) % n;
                const std::size_t k0 = g.index(i, j);
                const std::size_t k1 = axis == 0 ? g.index(cp, j) : g.index(i, cp);
                const double dF = (F[k1] - F[k0]) / h;
                const double flux = lp.diffusion * (p.values[k1] - p.values[k0]) / h +
                                    lp.gamma * dF * 0.5 * (p.values[k1] + p.values[k0]);
                out.values[k0] += lp.dt / (h * axis_weight(c)) * flux;
                out.values[k1] -= lp.dt / (h * axis_weight(cp)) * flux;
            }
        }
    }
    return out;
}

DensityField fp_stationary(const GridSpec& grid, const std::vector<double>& F,
                           const LearningParams& lp) {
    if (!(lp.diffusion > 0.0))
        throw DomainError("fp_stationary: diffusion must be positive");
    if (F.size() != grid.size())
        throw ConfigError("fp_stationary: F size does not match grid");
    DensityField out;
    out.grid = grid;
    out.values.resize(grid.size());
    const double fmin = *std::min_element(F.begin(), F.end());
    for (std::size_t k = 0; k < F.size(); ++k)
        out.values[k] = std::exp(-(lp.gamma / lp.diffusion) * (F[k] - fmin));
    normalize(out);
    return out;
}

}  // namespace emlab
