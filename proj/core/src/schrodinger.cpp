#include "emlab/schrodinger.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "emlab/errors.hpp"

namespace emlab {

namespace {

using cplx = std::complex<double>;

// Thomas solve of a complex tridiagonal system; `lower[c]` couples row c to
// c-1, `upper[c]` couples row c to c+1.  Overwrites rhs with the solution.
void solve_tridiag(std::vector<cplx>& diag, const std::vector<cplx>& lower,
                   const std::vector<cplx>& upper, std::vector<cplx>& rhs) {
    const int n = static_cast<int>(diag.size());
    for (int c = 1; c < n; ++c) {
        const cplx m = lower[c] / diag[c - 1];
        diag[c] -= m * upper[c - 1];
        rhs[c] -= m * rhs[c - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (int c = n - 2; c >= 0; --c)
        rhs[c] = (rhs[c] - upper[c] * rhs[c + 1]) / diag[c];
}

// Cyclic variant (Sherman-Morrison) for a system with equal corner couplings.
void solve_cyclic(const std::vector<cplx>& diag, const cplx off,
                  const cplx corner, std::vector<cplx>& rhs) {
    const int n = static_cast<int>(diag.size());
    const cplx gamma = -diag[0];
    std::vector<cplx> d(diag), lower(n, off), upper(n, off), u(n, cplx(0.0));
    d[0] -= gamma;
    d[n - 1] -= corner * corner / gamma;
    u[0] = gamma;
    u[n - 1] = corner;
    std::vector<cplx> z = u;
    std::vector<cplx> dcopy = d;
    solve_tridiag(d, lower, upper, rhs);
    solve_tridiag(dcopy, lower, upper, z);
    const cplx vy = rhs[0] + (corner / gamma) * rhs[n - 1];
    const cplx vz = z[0] + (corner / gamma) * z[n - 1];
    const cplx factor = vy / (1.0 + vz);
    for (int c = 0; c < n; ++c) rhs[c] -= factor * z[c];
}

// One Crank-Nicolson sweep along `axis` with Hamiltonian
//   H = -(hbar^2/2m) d^2/dq^2 + Vshare.
void cn_axis_sweep(WaveField& w, const std::vector<double>& vshare,
                   double dt, int axis) {
    const GridSpec& g = w.grid;
    const int ni = g.res[0];
    const int nj = g.dim == 2 ? g.res[1] : 1;
    const int n = axis == 0 ? ni : nj;
    const int n_lines = axis == 0 ? nj : ni;
    const double h = g.spacing(axis);
    const double t_off = -w.hbar * w.hbar / (2.0 * w.mass * h * h);
    const cplx a(0.0, dt / (2.0 * w.hbar));
    const bool periodic = g.boundary == Boundary::periodic;

    std::vector<cplx> line(n), rhs(n), diag(n), lower(n), upper(n);
    for (int l = 0; l < n_lines; ++l) {
        auto node = [&](int c) {
            return axis == 0 ? g.index(c, l) : g.index(l, c);
        };
        for (int c = 0; c < n; ++c) line[c] = w.values[node(c)];

        // rhs = (I - a H) psi, system matrix = (I + a H).
        for (int c = 0; c < n; ++c) {
            const double hdiag = -2.0 * t_off + vshare[node(c)];
            double cl = t_off, cr = t_off;
            if (!periodic) {
                if (c == 0) { cl = 0.0; cr = 2.0 * t_off; }
                if (c == n - 1) { cl = 2.0 * t_off; cr = 0.0; }
            }
            cplx acc = (1.0 - a * hdiag) * line[c];
            const int cm = (c + n - 1) % n;
            const int cp = (c + 1) % n;
            if (periodic || c > 0) acc -= a * cl * line[cm];
            if (periodic || c < n - 1) acc -= a * cr * line[cp];
            rhs[c] = acc;
            diag[c] = 1.0 + a * hdiag;
            lower[c] = a * cl;
            upper[c] = a * cr;
        }
        if (periodic)
            solve_cyclic(diag, a * t_off, a * t_off, rhs);
        else
            solve_tridiag(diag, lower, upper, rhs);
        for (int c = 0; c < n; ++c) w.values[node(c)] = rhs[c];
    }
}

}  // namespace

double wave_norm(const WaveField& w) {
    std::vector<double> dens(w.values.size());
    for (std::size_t k = 0; k < dens.size(); ++k)
        dens[k] = std::norm(w.values[k]);
    return w.grid.integrate(dens);
}

DensityField wave_density(const WaveField& w) {
    DensityField p;
    p.grid = w.grid;
    p.time = w.time;
    p.values.resize(w.values.size());
    for (std::size_t k = 0; k < p.values.size(); ++k)
        p.values[k] = std::norm(w.values[k]);
    return p;
}

WaveField schrodinger_step(const WaveField& w, const std::vector<double>& V,
                           double dt) {
    w.grid.validate();
    if (V.size() != w.grid.size())
        throw ConfigError("schrodinger_step: V size does not match grid");
    if (!(dt > 0.0)) throw ConfigError("schrodinger_step: dt must be positive");
    if (!(w.hbar > 0.0) || !(w.mass > 0.0))
        throw ConfigError("schrodinger_step: hbar and mass must be positive");
    double vmax = 0.0;
    for (double v : V) vmax = std::max(vmax, std::abs(v));
    if (vmax > 0.0 && dt * vmax / w.hbar >= 0.1) {
        const double suggested = 0.05 * w.hbar / vmax;
        std::ostringstream msg;
        msg << "schrodinger_step: dt = " << dt
            << " does not resolve the fastest potential phase; use dt <= "
            << suggested;
        throw StabilityError(msg.str(), suggested);
    }
    const double nrm = wave_norm(w);
    if (std::abs(nrm - 1.0) > 1e-6)
        throw ConfigError("schrodinger_step: wavefield norm deviates from 1");

    WaveField out = w;
    if (w.grid.dim == 1) {
        cn_axis_sweep(out, V, dt, 0);
    } else {
        // Split the potential evenly between the two axis sweeps; each sweep
        // is unitary, so the composition stays norm-preserving.
        std::vector<double> vhalf(V.size());
        for (std::size_t k = 0; k < V.size(); ++k) vhalf[k] = 0.5 * V[k];
        cn_axis_sweep(out, vhalf, dt, 0);
        cn_axis_sweep(out, vhalf, dt, 1);
    }
    out.time = w.time + dt;
    return out;
}

WaveField schrodinger_run(const WaveField& w, const std::vector<double>& V,
                          double dt, long n_steps) {
    WaveField cur = w;
    for (long s = 0; s < n_steps; ++s) cur = schrodinger_step(cur, V, dt);
    return cur;
}

}  // namespace emlab
