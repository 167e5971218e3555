#include "emlab/geodesic.hpp"

#include <cmath>
#include <string>

#include "emlab/errors.hpp"
#include "emlab/rng.hpp"

namespace emlab {
namespace {

// Gamma contracted twice with a four-velocity: out^mu = G^mu_ab u^a u^b.
void gamma_uu(const std::array<double, 160>& gamma, const Eigen::Vector4d& u,
              Eigen::Vector4d& out) {
    for (int mu = 0; mu < 4; ++mu) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a) {
            double inner = 0.0;
            for (int b = 0; b < 4; ++b)
                inner += gamma[(mu * 4 + a) * 4 + b] * u[b];
            s += inner * u[a];
        }
        out[mu] = s;
    }
}

}  // namespace

bool sample_metric(const SpacetimeMetric& sm, const double x[4],
                   Eigen::Matrix4d& g_out) {
    const Grid4& grid = sm.grid;
    int base[4];
    double frac[4];
    for (int a = 0; a < 4; ++a) {
        if (grid.res[a] == 1) {
            base[a] = 0;
            frac[a] = 0.0;
            continue;
        }
        const double h = grid.spacing(a);
        double u = (x[a] - grid.min[a]) / h;
        if (grid.periodic[a]) {
            const int n = grid.res[a];
            u -= std::floor(u / n) * n;
            base[a] = static_cast<int>(std::floor(u));
            if (base[a] >= n) base[a] = n - 1;
            frac[a] = u - base[a];
        } else {
            if (u < 0.0 || u > grid.res[a] - 1) return false;
            base[a] = static_cast<int>(std::floor(u));
            if (base[a] >= grid.res[a] - 1) base[a] = grid.res[a] - 2;
            frac[a] = u - base[a];
        }
    }
    g_out.setZero();
    for (int m = 0; m < 16; ++m) {
        int corner[4];
        double w = 1.0;
        bool degenerate = false;
        for (int a = 0; a < 4; ++a) {
            const int bit = (m >> a) & 1;
            if (grid.res[a] == 1) {
                if (bit) {
                    degenerate = true;
                    break;
                }
                corner[a] = 0;
                continue;
            }
            int idx = base[a] + bit;
            if (grid.periodic[a]) idx %= grid.res[a];
            corner[a] = idx;
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        if (degenerate || w == 0.0) continue;
        const std::size_t node =
            grid.index(corner[0], corner[1], corner[2], corner[3]);
        if (sm.flagged[node]) return false;
        g_out += w * sm.g[node];
    }
    return true;
}

GeodesicPath geodesic_integrate(const ChristoffelField& cf,
                                const Eigen::Vector4d& x0,
                                const Eigen::Vector3d& v0, double duration,
                                double dt) {
    if (!(dt > 0.0) || !(duration > 0.0))
        throw ConfigError("geodesic needs positive dt and duration");
    GeodesicPath path;
    path.proper_parameterized = false;

    // state: spatial position and spatial coordinate velocity
    Eigen::Vector3d x = x0.tail<3>();
    Eigen::Vector3d v = v0;
    double t = x0[0];
    const double t_end = x0[0] + duration;

    std::array<double, 160> gamma;
    auto rhs = [&](double tc, const Eigen::Vector3d& xc,
                   const Eigen::Vector3d& vc, Eigen::Vector3d& dx,
                   Eigen::Vector3d& dv) -> bool {
        double ev[4] = {tc, xc[0], xc[1], xc[2]};
        if (!cf.sample(ev, gamma)) return false;
        Eigen::Vector4d u(1.0, vc[0], vc[1], vc[2]);
        Eigen::Vector4d guu;
        gamma_uu(gamma, u, guu);
        dx = vc;
        for (int a = 0; a < 3; ++a) dv[a] = guu[0] * vc[a] - guu[a + 1];
        return true;
    };

    auto record = [&](double tc, const Eigen::Vector3d& xc,
                      const Eigen::Vector3d& vc) {
        path.params.push_back(tc);
        path.positions.emplace_back(tc, xc[0], xc[1], xc[2]);
        path.velocities.emplace_back(1.0, vc[0], vc[1], vc[2]);
    };
    record(t, x, v);

    while (t < t_end - 1e-12) {
        const double step = std::min(dt, t_end - t);
        Eigen::Vector3d k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
        if (!rhs(t, x, v, k1x, k1v) ||
            !rhs(t + 0.5 * step, x + 0.5 * step * k1x, v + 0.5 * step * k1v,
                 k2x, k2v) ||
            !rhs(t + 0.5 * step, x + 0.5 * step * k2x, v + 0.5 * step * k2v,
                 k3x, k3v) ||
            !rhs(t + step, x + step * k3x, v + step * k3v, k4x, k4v)) {
            path.exited = true;
            break;
        }
        x += step / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += step / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t += step;
        ++path.n_steps;
        record(t, x, v);
    }
    return path;
}

GeodesicPath geodesic_integrate_proper(const ChristoffelField& cf,
                                       const SpacetimeMetric& sm,
                                       const Eigen::Vector4d& x0,
                                       const Eigen::Vector3d& v0,
                                       double duration, double dtau) {
    if (!(dtau > 0.0) || !(duration > 0.0))
        throw ConfigError("geodesic needs positive dtau and duration");
    Eigen::Matrix4d g;
    double ev0[4] = {x0[0], x0[1], x0[2], x0[3]};
    if (!sample_metric(sm, ev0, g))
        throw DomainError("geodesic start lies outside the usable region");
    Eigen::Vector4d u(1.0, v0[0], v0[1], v0[2]);
    const double norm0 = u.dot(g * u);
    if (!(norm0 < 0.0))
        throw DomainError("initial velocity is not timelike");
    u /= std::sqrt(-norm0);

    GeodesicPath path;
    path.proper_parameterized = true;
    Eigen::Vector4d x = x0;
    double tau = 0.0;
    const double t_end = x0[0] + duration;

    std::array<double, 160> gamma;
    auto rhs = [&](const Eigen::Vector4d& xc, const Eigen::Vector4d& uc,
                   Eigen::Vector4d& dx, Eigen::Vector4d& du) -> bool {
        double evc[4] = {xc[0], xc[1], xc[2], xc[3]};
        if (!cf.sample(evc, gamma)) return false;
        Eigen::Vector4d guu;
        gamma_uu(gamma, uc, guu);
        dx = uc;
        du = -guu;
        return true;
    };

    auto record = [&](double tc, const Eigen::Vector4d& xc,
                      const Eigen::Vector4d& uc) {
        path.params.push_back(tc);
        path.positions.push_back(xc);
        path.velocities.push_back(uc);
        double evc[4] = {xc[0], xc[1], xc[2], xc[3]};
        Eigen::Matrix4d gc;
        if (sample_metric(sm, evc, gc)) {
            const double drift = std::abs(uc.dot(gc * uc) + 1.0);
            path.max_norm_drift = std::max(path.max_norm_drift, drift);
        }
    };
    record(tau, x, u);

    const long max_steps =
        static_cast<long>(std::ceil(10.0 * duration / dtau)) + 16;
    while (x[0] < t_end - 1e-12 && path.n_steps < max_steps) {
        Eigen::Vector4d k1x, k1u, k2x, k2u, k3x, k3u, k4x, k4u;
        if (!rhs(x, u, k1x, k1u) ||
            !rhs(x + 0.5 * dtau * k1x, u + 0.5 * dtau * k1u, k2x, k2u) ||
            !rhs(x + 0.5 * dtau * k2x, u + 0.5 * dtau * k2u, k3x, k3u) ||
            !rhs(x + dtau * k3x, u + dtau * k3u, k4x, k4u)) {
            path.exited = true;
            break;
        }
        x += dtau / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        u += dtau / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        tau += dtau;
        ++path.n_steps;
        record(tau, x, u);
    }
    return path;
}

double proper_time(const SpacetimeMetric& sm,
                   const std::vector<Eigen::Vector4d>& positions) {
    if (positions.size() < 2)
        throw ConfigError("proper time needs at least two samples");
    double tau = 0.0;
    Eigen::Matrix4d g;
    for (std::size_t s = 0; s + 1 < positions.size(); ++s) {
        const Eigen::Vector4d mid = 0.5 * (positions[s] + positions[s + 1]);
        double ev[4] = {mid[0], mid[1], mid[2], mid[3]};
        if (!sample_metric(sm, ev, g))
            throw DomainError("path segment " + std::to_string(s) +
                              " leaves the usable region");
        const Eigen::Vector4d dx = positions[s + 1] - positions[s];
        const double ds2 = -dx.dot(g * dx);
        const double scale = dx.squaredNorm();
        if (ds2 < -1e-12 * std::max(1.0, scale))
            throw DomainError("path segment " + std::to_string(s) +
                              " is spacelike (ds2 = " + std::to_string(ds2) +
                              ")");
        tau += std::sqrt(std::max(0.0, ds2));
    }
    return tau;
}

std::vector<Eigen::Vector4d> perturb_path(
    const std::vector<Eigen::Vector4d>& base, std::uint64_t seed,
    double amplitude) {
    if (base.size() < 3)
        throw ConfigError("perturbing a path needs at least 3 samples");
    RngStream rng(seed, 0);
    const double pi = 3.14159265358979323846;
    double coef[3][3];
    for (int a = 0; a < 3; ++a)
        for (int k = 0; k < 3; ++k)
            coef[a][k] = amplitude * (2.0 * rng.uniform() - 1.0) / (k + 1.0);
    std::vector<Eigen::Vector4d> out(base);
    const double span = static_cast<double>(base.size() - 1);
    for (std::size_t s = 1; s + 1 < base.size(); ++s) {
        const double u = static_cast<double>(s) / span;
        for (int a = 0; a < 3; ++a) {
            double d = 0.0;
            for (int k = 0; k < 3; ++k)
                d += coef[a][k] * std::sin((k + 1.0) * pi * u);
            out[s][a + 1] += d;
        }
    }
    return out;
}

}  // namespace emlab
