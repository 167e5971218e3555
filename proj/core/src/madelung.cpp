#include "emlab/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emlab/errors.hpp"

namespace emlab {
namespace {

struct Rhs {
    std::vector<double> dp;
    std::vector<double> du[2];
};

void check_positive(const std::vector<double>& p, double floor_value,
                    const char* where) {
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!std::isfinite(p[k]) || p[k] < floor_value) {
            throw NodeError(std::string(where) + ": density " +
                            std::to_string(p[k]) + " at node " +
                            std::to_string(k) + " is below the positivity floor");
        }
    }
}

// Second derivative along one axis: periodic wrap, or a mirror ghost at
// reflecting walls.  The mirror closure forces a zero normal derivative at
// the wall; one-sided (extrapolated-ghost) closures are consistent where the
// state has a normal slope, but they turn the wall into an ill-posed inflow
// node for the self-advection term and the wall velocity runs away.  The
// mirror is kept because it is the dynamically stable choice; its wall error
// is confined to the outermost nodes, so domains are sized to keep the
// density there negligible.
std::vector<double> axis_second_derivative(const GridSpec& grid,
                                           const std::vector<double>& f,
                                           int ax) {
    const double h = grid.spacing(ax);
    const int n0 = grid.res[0];
    const int n1 = grid.dim == 2 ? grid.res[1] : 1;
    const int nc = ax == 0 ? n0 : n1;
    std::vector<double> out(grid.size());
    auto along = [&](int i, int j, int c) {
        return ax == 0 ? f[grid.index(c, j)] : f[grid.index(i, c)];
    };
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n0; ++i) {
            const int c = ax == 0 ? i : j;
            double fm, fp2;
            if (grid.boundary == Boundary::periodic) {
                fm = along(i, j, (c + nc - 1) % nc);
                fp2 = along(i, j, (c + 1) % nc);
            } else {
                fm = along(i, j, c == 0 ? 1 : c - 1);
                fp2 = along(i, j, c == nc - 1 ? nc - 2 : c + 1);
            }
            out[grid.index(i, j)] =
                (fp2 - 2.0 * along(i, j, c) + fm) / (h * h);
        }
    return out;
}

Rhs evaluate_rhs(const GridSpec& grid, const std::vector<double>& p,
                 const std::vector<double> u[2], const std::vector<double>& V,
                 const QuantumParams& qp, double positivity_floor) {
    check_positive(p, positivity_floor, "madelung_step");
    const std::size_t n = grid.size();
    const double m = qp.mass;
    const double hb = qp.hbar;

    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = std::sqrt(p[k]);

    // Q + V drives the velocity equation through its gradient.
    std::vector<double> drive(V);
    for (int ax = 0; ax < grid.dim; ++ax) {
        const std::vector<double> lap = axis_second_derivative(grid, s, ax);
        for (std::size_t k = 0; k < n; ++k)
            drive[k] += -(hb * hb / (2.0 * m)) * lap[k] / s[k];
    }

    Rhs rhs;
    rhs.dp.assign(n, 0.0);
    for (int ax = 0; ax < grid.dim; ++ax) {
        std::vector<double> flux(n);
        for (std::size_t k = 0; k < n; ++k) flux[k] = u[ax][k] * p[k];
        std::vector<double> dflux = gradient_axis(grid, flux, ax);
        for (std::size_t k = 0; k < n; ++k) rhs.dp[k] += dflux[k];
    }
    for (int j = 0; j < grid.dim; ++j) {
        rhs.du[j].assign(n, 0.0);
        std::vector<double> ddrive = gradient_axis(grid, drive, j);
        for (std::size_t k = 0; k < n; ++k)
            rhs.du[j][k] = ddrive[k] / m;
        for (int ax = 0; ax < grid.dim; ++ax) {
            std::vector<double> duj = gradient_axis(grid, u[j], ax);
            for (std::size_t k = 0; k < n; ++k)
                rhs.du[j][k] += u[ax][k] * duj[k];
        }
    }
    return rhs;
}

}  // namespace

double madelung_stable_dt(const MadelungState& state, const QuantumParams& qp,
                          double c_stab) {
    const GridSpec& grid = state.p.grid;
    double rate = 0.0;
    for (int ax = 0; ax < grid.dim; ++ax) {
        const double h = grid.spacing(ax);
        double umax = 0.0;
        for (double v : state.u.comps[ax])
            umax = std::max(umax, std::abs(v));
        const double pi = 3.14159265358979323846;
        rate += qp.hbar * pi * pi / (2.0 * qp.mass * h * h) + pi * umax / h;
    }
    // 2.83 is the extent of the RK4 stability region on the imaginary axis.
    return c_stab * 2.83 / rate;
}

std::vector<double> quantum_potential(const DensityField& p,
                                      const QuantumParams& qp,
                                      double positivity_floor) {
    check_positive(p.values, positivity_floor, "quantum_potential");
    const GridSpec& grid = p.grid;
    const std::size_t n = grid.size();
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = std::sqrt(p.values[k]);
    std::vector<double> q(n, 0.0);
    for (int ax = 0; ax < grid.dim; ++ax) {
        const std::vector<double> lap = axis_second_derivative(grid, s, ax);
        for (std::size_t k = 0; k < n; ++k)
            q[k] += -(qp.hbar * qp.hbar / (2.0 * qp.mass)) * lap[k] / s[k];
    }
    return q;
}

MadelungState madelung_step(const MadelungState& state,
                            const std::vector<double>& V,
                            const QuantumParams& qp, double dt, double c_stab,
                            double positivity_floor) {
    const GridSpec& grid = state.p.grid;
    if (!(state.u.grid == grid))
        throw ConfigError("madelung_step: density and velocity grids differ");
    if (V.size() != grid.size())
        throw ConfigError("madelung_step: potential has " +
                          std::to_string(V.size()) + " nodes, grid has " +
                          std::to_string(grid.size()));
    if (!(dt > 0.0)) throw ConfigError("madelung_step: dt must be positive");
    if (!(qp.hbar > 0.0) || !(qp.mass > 0.0))
        throw ConfigError("madelung_step: hbar and mass must be positive");
    const double dt_max = madelung_stable_dt(state, qp, c_stab);
    if (dt > dt_max)
        throw StabilityError("madelung_step: dt " + std::to_string(dt) +
                                 " exceeds the dispersive stability bound",
                             dt_max);

    const std::size_t n = grid.size();
    auto combine = [&](const std::vector<double>& base,
                       const std::vector<double>& k, double w) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + w * k[i];
        return out;
    };

    const std::vector<double>& p0 = state.p.values;
    const std::vector<double> u0[2] = {state.u.comps[0], state.u.comps[1]};

    Rhs k1 = evaluate_rhs(grid, p0, u0, V, qp, positivity_floor);
    std::vector<double> p1 = combine(p0, k1.dp, 0.5 * dt);
    std::vector<double> u1[2];
    for (int j = 0; j < grid.dim; ++j)
        u1[j] = combine(u0[j], k1.du[j], 0.5 * dt);
    if (grid.dim == 1) u1[1] = u0[1];

    Rhs k2 = evaluate_rhs(grid, p1, u1, V, qp, positivity_floor);
    std::vector<double> p2 = combine(p0, k2.dp, 0.5 * dt);
    std::vector<double> u2[2];
    for (int j = 0; j < grid.dim; ++j)
        u2[j] = combine(u0[j], k2.du[j], 0.5 * dt);
    if (grid.dim == 1) u2[1] = u0[1];

    Rhs k3 = evaluate_rhs(grid, p2, u2, V, qp, positivity_floor);
    std::vector<double> p3 = combine(p0, k3.dp, dt);
    std::vector<double> u3[2];
    for (int j = 0; j < grid.dim; ++j) u3[j] = combine(u0[j], k3.du[j], dt);
    if (grid.dim == 1) u3[1] = u0[1];

    Rhs k4 = evaluate_rhs(grid, p3, u3, V, qp, positivity_floor);

    MadelungState out = state;
    for (std::size_t i = 0; i < n; ++i)
        out.p.values[i] = p0[i] + dt / 6.0 * (k1.dp[i] + 2.0 * k2.dp[i] +
                                              2.0 * k3.dp[i] + k4.dp[i]);
    for (int j = 0; j < grid.dim; ++j)
        for (std::size_t i = 0; i < n; ++i)
            out.u.comps[j][i] =
                u0[j][i] + dt / 6.0 * (k1.du[j][i] + 2.0 * k2.du[j][i] +
                                       2.0 * k3.du[j][i] + k4.du[j][i]);
    check_positive(out.p.values, positivity_floor, "madelung_step(result)");
    out.p.time += dt;
    out.u.time += dt;
    return out;
}

MadelungState madelung_run(const MadelungState& state,
                           const std::vector<double>& V,
                           const QuantumParams& qp, double dt, long n_steps,
                           double c_stab, double positivity_floor) {
    MadelungState cur = state;
    for (long s = 0; s < n_steps; ++s)
        cur = madelung_step(cur, V, qp, dt, c_stab, positivity_floor);
    return cur;
}

MadelungState madelung_run_adaptive(const MadelungState& state,
                                    const std::vector<double>& V,
                                    const QuantumParams& qp, double duration,
                                    double safety, double c_stab,
                                    double positivity_floor) {
    MadelungState cur = state;
    double left = duration;
    const double eps = 1e-12 * duration;
    while (left > eps) {
        double dt = safety * madelung_stable_dt(cur, qp, c_stab);
        if (dt >= left) dt = left;
        cur = madelung_step(cur, V, qp, dt, c_stab, positivity_floor);
        left -= dt;
    }
    return cur;
}

}  // namespace emlab
