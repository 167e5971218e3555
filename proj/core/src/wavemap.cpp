#include "emlab/wavemap.hpp"

#include <cmath>

#include "emlab/errors.hpp"

namespace emlab {

WaveField to_wavefunction(const DensityField& p,
                          const std::vector<double>& f_tilde, double hbar,
                          double mass) {
    if (f_tilde.size() != p.grid.size())
        throw ConfigError("to_wavefunction: Ftilde size does not match grid");
    if (!(hbar > 0.0) || !(mass > 0.0))
        throw ConfigError("to_wavefunction: hbar and mass must be positive");
    WaveField w;
    w.grid = p.grid;
    w.hbar = hbar;
    w.mass = mass;
    w.time = p.time;
    w.values.resize(p.values.size());
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        const double v = p.values[k];
        if (v < 0.0)
            throw DomainError("to_wavefunction: negative density value");
        w.values[k] = std::polar(std::sqrt(v), -f_tilde[k] / hbar);
    }
    return w;
}

namespace {

double wrap_delta(double d) {
    while (d > M_PI) d -= 2.0 * M_PI;
    while (d < -M_PI) d += 2.0 * M_PI;
    return d;
}

}  // namespace

std::vector<double> unwrap_phase(const GridSpec& grid,
                                 const std::vector<double>& wrapped) {
    std::vector<double> out(wrapped.size(), 0.0);
    const int ni = grid.res[0];
    const int nj = grid.dim == 2 ? grid.res[1] : 1;
    // First row: accumulate wrapped increments left to right.
    out[grid.index(0, 0)] = wrapped[grid.index(0, 0)];
    for (int i = 1; i < ni; ++i)
        out[grid.index(i, 0)] =
            out[grid.index(i - 1, 0)] +
            wrap_delta(wrapped[grid.index(i, 0)] - wrapped[grid.index(i - 1, 0)]);
    // Remaining rows: continue each column upward from the unwrapped row.
    for (int j = 1; j < nj; ++j)
        for (int i = 0; i < ni; ++i)
            out[grid.index(i, j)] =
                out[grid.index(i, j - 1)] +
                wrap_delta(wrapped[grid.index(i, j)] -
                           wrapped[grid.index(i, j - 1)]);
    return out;
}

WaveDecomposition from_wavefunction(const WaveField& w, double floor) {
    WaveDecomposition d;
    d.p.grid = w.grid;
    d.p.time = w.time;
    d.p.values.resize(w.values.size());
    std::vector<double> wrapped(w.values.size());
    for (std::size_t k = 0; k < w.values.size(); ++k) {
        d.p.values[k] = std::norm(w.values[k]);
        if (d.p.values[k] < floor)
            throw NodeError(
                "from_wavefunction: |Psi|^2 below the positivity floor; phase "
                "is undefined at a node");
        wrapped[k] = std::arg(w.values[k]);
    }
    const auto phase = unwrap_phase(w.grid, wrapped);
    d.f_tilde.resize(phase.size());
    for (std::size_t k = 0; k < phase.size(); ++k)
        d.f_tilde[k] = -w.hbar * phase[k];
    d.u.grid = w.grid;
    d.u.time = w.time;
    // u = -(hbar/m) dtheta/dq.  On periodic axes the unwrapped phase is a
    // ramp that breaks at the seam, so the derivative is taken from wrapped
    // single-step increments, which are seam-safe.
    for (int axis = 0; axis < w.grid.dim; ++axis) {
        if (w.grid.boundary == Boundary::periodic) {
            auto& u = d.u.comps[axis];
            u.assign(w.values.size(), 0.0);
            const int ni = w.grid.res[0];
            const int nj = w.grid.dim == 2 ? w.grid.res[1] : 1;
            const int n = axis == 0 ? ni : nj;
            const double h = w.grid.spacing(axis);
            for (int j = 0; j < nj; ++j)
                for (int i = 0; i < ni; ++i) {
                    const int c = axis == 0 ? i : j;
                    const int cp = (c + 1) % n;
                    const int cm = (c + n - 1) % n;
                    auto at = [&](int cc) {
                        return wrapped[axis == 0 ? w.grid.index(cc, j)
                                                 : w.grid.index(i, cc)];
                    };
                    const double dtheta =
                        wrap_delta(at(cp) - at(c)) + wrap_delta(at(c) - at(cm));
                    u[w.grid.index(i, j)] =
                        -w.hbar / w.mass * dtheta / (2.0 * h);
                }
        } else {
            d.u.comps[axis] = gradient_axis(w.grid, d.f_tilde, axis);
            for (double& v : d.u.comps[axis]) v /= w.mass;
        }
    }
    return d;
}

}  // namespace emlab
