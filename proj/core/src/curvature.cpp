#include "emlab/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "emlab/errors.hpp"
#include "emlab/rng.hpp"

namespace emlab {
namespace {

bool shift_node(const Grid4& grid, const int c[4], int axis, int delta,
                std::size_t& out) {
    int v = c[axis] + delta;
    const int n = grid.res[axis];
    if (grid.periodic[axis]) {
        v = (v % n + n) % n;
    } else if (v < 0 || v >= n) {
        return false;
    }
    int cc[4] = {c[0], c[1], c[2], c[3]};
    cc[axis] = v;
    out = grid.index(cc[0], cc[1], cc[2], cc[3]);
    return true;
}

// Contraction C_mu = Gamma^g_{g mu} per node.
void contraction(const ChristoffelField& cf, std::size_t node, double c[4]) {
    for (int mu = 0; mu < 4; ++mu) {
        double sum = 0.0;
        for (int g = 0; g < 4; ++g) sum += cf.at(node, g, g, mu);
        c[mu] = sum;
    }
}

}  // namespace

double RicciField::max_abs() const {
    double worst = 0.0;
    for (std::size_t node = 0; node < value.size(); ++node) {
        if (flagged[node]) continue;
        worst = std::max(worst, value[node].cwiseAbs().maxCoeff());
    }
    return worst;
}

double EinsteinField::max_abs() const {
    double worst = 0.0;
    for (std::size_t node = 0; node < value.size(); ++node) {
        if (flagged[node]) continue;
        worst = std::max(worst, value[node].cwiseAbs().maxCoeff());
    }
    return worst;
}

RicciField ricci(const SpacetimeMetric& sm, const ChristoffelField& cf) {
    if (!(cf.grid == sm.grid))
        throw ConfigError("ricci: metric and connection grids differ");
    const Grid4& grid = sm.grid;
    const std::size_t n = grid.size();
    RicciField rf;
    rf.grid = grid;
    rf.value.assign(n, Eigen::Matrix4d::Zero());
    rf.flagged.assign(n, 1);

    int c[4];
    for (std::size_t node = 0; node < n; ++node) {
        if (cf.flagged[node]) continue;
        grid.unpack(node, c);
        const double* gptr[4][2];
        double inv2h[4];
        bool ok = true;
        for (int ax = 0; ax < 4 && ok; ++ax) {
            if (grid.res[ax] == 1) {
                gptr[ax][0] = nullptr;
                gptr[ax][1] = nullptr;
                inv2h[ax] = 0.0;
                continue;
            }
            std::size_t np, nm;
            if (!shift_node(grid, c, ax, 1, np) ||
                !shift_node(grid, c, ax, -1, nm) || cf.flagged[np] ||
                cf.flagged[nm]) {
                ok = false;
                break;
            }
            gptr[ax][0] = &cf.coeffs[np * 40];
            gptr[ax][1] = &cf.coeffs[nm * 40];
            inv2h[ax] = 1.0 / (2.0 * grid.spacing(ax));
        }
        if (!ok) continue;

        double cself[4];
        contraction(cf, node, cself);

        Eigen::Matrix4d raw = Eigen::Matrix4d::Zero();
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                double val = 0.0;
                // sum_mu d_mu Gamma^mu_ab
                for (int mu = 0; mu < 4; ++mu) {
                    if (!gptr[mu][0]) continue;
                    const int s = mu * 10 + ChristoffelField::pair_index(a, b);
                    val += (gptr[mu][0][s] - gptr[mu][1][s]) * inv2h[mu];
                }
                // - d_b Gamma^mu_{a mu}
                if (gptr[b][0]) {
                    double cp = 0.0, cm = 0.0;
                    for (int mu = 0; mu < 4; ++mu) {
                        const int s =
                            mu * 10 + ChristoffelField::pair_index(a, mu);
                        cp += gptr[b][0][s];
                        cm += gptr[b][1][s];
                    }
                    val -= (cp - cm) * inv2h[b];
                }
                // Gamma^mu_ab Gamma^g_{g mu}
                for (int mu = 0; mu < 4; ++mu)
                    val += cf.at(node, mu, a, b) * cself[mu];
                // - Gamma^mu_{a g} Gamma^g_{b mu}
                for (int mu = 0; mu < 4; ++mu)
                    for (int g = 0; g < 4; ++g)
                        val -= cf.at(node, mu, a, g) * cf.at(node, g, b, mu);
                raw(a, b) = val;
            }
        }
        const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
        rf.max_asymmetry = std::max(rf.max_asymmetry, asym);
        rf.value[node] = 0.5 * (raw + raw.transpose());
        rf.flagged[node] = 0;
    }
    return rf;
}

RicciField ricci(const SpacetimeMetric& sm) {
    return ricci(sm, christoffel(sm));
}

ActionReport eh_action(const SpacetimeMetric& sm) {
    const ChristoffelField cf = christoffel(sm);
    const RicciField rf = ricci(sm, cf);
    const Grid4& grid = sm.grid;
    const std::size_t n = grid.size();

    // P^{ab} = sqrt(-g) g^{ab}
    std::vector<double> P(n * 10, 0.0);
    for (std::size_t node = 0; node < n; ++node)
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b)
                P[node * 10 + ChristoffelField::pair_index(a, b)] =
                    sm.sqrt_minus_g[node] * sm.g_inv[node](a, b);

    ActionReport report;
    int c[4];
    for (std::size_t node = 0; node < n; ++node) {
        if (!sm.flagged[node]) {
            grid.unpack(node, c);
            report.volume += sm.sqrt_minus_g[node] * grid.node_weight(c);
        }
        if (cf.flagged[node]) continue;
        grid.unpack(node, c);
        const double w = grid.node_weight(c);

        double cself[4];
        contraction(cf, node, cself);

        // sqrt(-g) g^{ab} Gamma^mu_ab C_mu
        double term1 = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double s = 0.0;
                for (int mu = 0; mu < 4; ++mu)
                    s += cf.at(node, mu, a, b) * cself[mu];
                term1 += sm.g_inv[node](a, b) * s;
            }
        term1 *= sm.sqrt_minus_g[node];

        // Gamma^mu_ab d_mu P^{ab}
        double term2 = 0.0;
        bool ok = true;
        for (int mu = 0; mu < 4 && ok; ++mu) {
            if (grid.res[mu] == 1) continue;
            std::size_t np, nm;
            if (!shift_node(grid, c, mu, 1, np) ||
                !shift_node(grid, c, mu, -1, nm) || sm.flagged[np] ||
                sm.flagged[nm]) {
                ok = false;
                break;
            }
            const double inv2h = 1.0 / (2.0 * grid.spacing(mu));
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const int s = ChristoffelField::pair_index(a, b);
                    const double dP =
                        (P[np * 10 + s] - P[nm * 10 + s]) * inv2h;
                    term2 += cf.at(node, mu, a, b) * dP;
                }
        }
        if (!ok) continue;
        report.gamma_gamma_value += -0.5 * w * (term1 + term2);

        if (!rf.flagged[node]) {
            double scalar = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    scalar += sm.g_inv[node](a, b) * rf.value[node](a, b);
            report.ricci_value += w * sm.sqrt_minus_g[node] * scalar;
        }
    }
    report.total = report.ricci_value;
    return report;
}

ActionReport lambda_functional(const SpacetimeMetric& sm, double lambda,
                               double n_bar) {
    ActionReport report = eh_action(sm);
    report.lambda = lambda;
    report.n_bar = n_bar;
    report.total = report.ricci_value - 2.0 * lambda * report.volume +
                   2.0 * lambda * n_bar;
    return report;
}

EinsteinField einstein_residual(const SpacetimeMetric& sm, double lambda) {
    const RicciField rf = ricci(sm);
    const std::size_t n = sm.grid.size();
    EinsteinField ef;
    ef.grid = sm.grid;
    ef.value.assign(n, Eigen::Matrix4d::Zero());
    ef.flagged = rf.flagged;
    for (std::size_t node = 0; node < n; ++node) {
        if (ef.flagged[node]) continue;
        double scalar = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                scalar += sm.g_inv[node](a, b) * rf.value[node](a, b);
        ef.value[node] = rf.value[node] - 0.5 * scalar * sm.g[node] +
                         lambda * sm.g[node];
    }
    return ef;
}

VariationalCheck einstein_variational_check(const SpacetimeMetric& sm,
                                            double lambda, int n_probe_nodes,
                                            std::uint64_t seed, double delta) {
    if (n_probe_nodes < 1)
        throw ConfigError("variational check needs at least one probe node");
    const EinsteinField ef = einstein_residual(sm, lambda);
    std::vector<std::size_t> candidates;
    for (std::size_t node = 0; node < ef.flagged.size(); ++node)
        if (!ef.flagged[node]) candidates.push_back(node);
    if (candidates.empty())
        throw DomainError("variational check: no usable nodes");

    RngStream rng(seed, 0);
    VariationalCheck out;
    int c[4];
    for (int probe = 0; probe < n_probe_nodes; ++probe) {
        const std::size_t node =
            candidates[rng.uniform_index(candidates.size())];
        sm.grid.unpack(node, c);
        const double w = sm.grid.node_weight(c);
        for (int mu = 0; mu < 4; ++mu) {
            for (int nu = mu; nu < 4; ++nu) {
                const double density =
                    sm.sqrt_minus_g[node] * ef.value[node](mu, nu);
                out.scale = std::max(out.scale, std::abs(density));
            }
        }
        for (int mu = 0; mu < 4; ++mu) {
            for (int nu = mu; nu < 4; ++nu) {
                double fd[2];
                for (int side = 0; side < 2; ++side) {
                    SpacetimeMetric pert = sm;
                    const double step = side == 0 ? delta : -delta;
                    pert.g_inv[node](mu, nu) += step;
                    if (nu != mu) pert.g_inv[node](nu, mu) += step;
                    pert.g[node] = pert.g_inv[node].inverse();
                    const double det = -pert.g[node].determinant();
                    if (!(det > 0.0))
                        throw NumericError(
                            "variational probe made the metric degenerate");
                    pert.sqrt_minus_g[node] = std::sqrt(det);
                    fd[side] = lambda_functional(pert, lambda, 0.0).total;
                }
                const double mult = (mu == nu) ? 1.0 : 2.0;
                const double fd_density =
                    (fd[0] - fd[1]) / (2.0 * delta) / (w * mult);
                const double density =
                    sm.sqrt_minus_g[node] * ef.value[node](mu, nu);
                out.max_relative_error = std::max(
                    out.max_relative_error, std::abs(fd_density - density));
                ++out.n_probes;
            }
        }
    }
    if (out.scale > 0.0) out.max_relative_error /= out.scale;
    return out;
}

}  // namespace emlab
