#include "emlab/christoffel.hpp"

#include <cmath>
#include <cstring>

#include "emlab/errors.hpp"

namespace emlab {
namespace {

// pair index for a <= b over 4 indices: 00 01 02 03 11 12 13 22 23 33
int pair_of(int a, int b) {
    static const int table[4][4] = {{0, 1, 2, 3},
                                    {1, 4, 5, 6},
                                    {2, 5, 7, 8},
                                    {3, 6, 8, 9}};
    return table[a][b];
}

// Offsets a node by +/-1 along an axis; false when the move leaves a
// non-periodic axis.
bool shift_node(const Grid4& grid, const int c[4], int axis, int delta,
                int out[4]) {
    for (int a = 0; a < 4; ++a) out[a] = c[a];
    int v = c[axis] + delta;
    const int n = grid.res[axis];
    if (grid.periodic[axis]) {
        v = (v % n + n) % n;
    } else if (v < 0 || v >= n) {
        return false;
    }
    out[axis] = v;
    return true;
}

}  // namespace

int ChristoffelField::pair_index(int a, int b) { return pair_of(a, b); }

double ChristoffelField::at(std::size_t node, int mu, int a, int b) const {
    return coeffs[node * 40 + mu * 10 + pair_of(a, b)];
}

double& ChristoffelField::slot(std::size_t node, int mu, int pair) {
    return coeffs[node * 40 + mu * 10 + pair];
}

double ChristoffelField::slot(std::size_t node, int mu, int pair) const {
    return coeffs[node * 40 + mu * 10 + pair];
}

std::size_t ChristoffelField::n_flagged() const {
    std::size_t n = 0;
    for (auto f : flagged) n += f;
    return n;
}

double ChristoffelField::max_abs() const {
    double worst = 0.0;
    for (std::size_t node = 0; node < flagged.size(); ++node) {
        if (flagged[node]) continue;
        for (int s = 0; s < 40; ++s)
            worst = std::max(worst, std::abs(coeffs[node * 40 + s]));
    }
    return worst;
}

bool ChristoffelField::sample(const double x[4],
                              std::array<double, 160>& out) const {
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
    out.fill(0.0);
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
        if (degenerate) continue;
        if (w == 0.0) continue;
        const std::size_t node =
            grid.index(corner[0], corner[1], corner[2], corner[3]);
        if (flagged[node]) return false;
        const double* src = &coeffs[node * 40];
        for (int s = 0; s < 40; ++s) out[s] += w * src[s];
    }
    // expand symmetric storage to the full 4x4x4 layout
    std::array<double, 160> full;
    full.fill(0.0);
    for (int mu = 0; mu < 4; ++mu)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                full[(mu * 4 + a) * 4 + b] = out[mu * 10 + pair_of(a, b)];
    out = full;
    return true;
}

bool central_derivative(const Grid4& grid, const std::vector<double>& values,
                        const std::vector<std::uint8_t>& flagged,
                        const int c[4], int axis, double& out) {
    if (grid.res[axis] == 1) {
        out = 0.0;
        return true;
    }
    int plus[4], minus[4];
    if (!shift_node(grid, c, axis, 1, plus) ||
        !shift_node(grid, c, axis, -1, minus))
        return false;
    const std::size_t np = grid.index(plus[0], plus[1], plus[2], plus[3]);
    const std::size_t nm = grid.index(minus[0], minus[1], minus[2], minus[3]);
    if (!flagged.empty() && (flagged[np] || flagged[nm])) return false;
    out = (values[np] - values[nm]) / (2.0 * grid.spacing(axis));
    return true;
}

ChristoffelField christoffel(const SpacetimeMetric& sm) {
    sm.validate();
    const Grid4& grid = sm.grid;
    const std::size_t n = grid.size();
    ChristoffelField cf;
    cf.grid = grid;
    cf.coeffs.assign(n * 40, 0.0);
    cf.flagged.assign(n, 0);

    int c[4];
    for (std::size_t node = 0; node < n; ++node) {
        if (sm.flagged[node]) {
            cf.flagged[node] = 1;
            continue;
        }
        grid.unpack(node, c);
        // dg[nu](a,b) = d g_ab / d x^nu
        Eigen::Matrix4d dg[4];
        bool ok = true;
        for (int nu = 0; nu < 4 && ok; ++nu) {
            if (grid.res[nu] == 1) {
                dg[nu].setZero();
                continue;
            }
            int plus[4], minus[4];
            if (!shift_node(grid, c, nu, 1, plus) ||
                !shift_node(grid, c, nu, -1, minus)) {
                ok = false;
                break;
            }
            const std::size_t np =
                grid.index(plus[0], plus[1], plus[2], plus[3]);
            const std::size_t nm =
                grid.index(minus[0], minus[1], minus[2], minus[3]);
            if (sm.flagged[np] || sm.flagged[nm]) {
                ok = false;
                break;
            }
            dg[nu] = (sm.g[np] - sm.g[nm]) / (2.0 * grid.spacing(nu));
        }
        if (!ok) {
            cf.flagged[node] = 1;
            continue;
        }
        const Eigen::Matrix4d& gi = sm.g_inv[node];
        for (int mu = 0; mu < 4; ++mu) {
            for (int a = 0; a < 4; ++a) {
                for (int b = a; b < 4; ++b) {
                    double sum = 0.0;
                    for (int nu = 0; nu < 4; ++nu)
                        sum += gi(mu, nu) * (dg[b](nu, a) + dg[a](nu, b) -
                                             dg[nu](a, b));
                    cf.slot(node, mu, pair_of(a, b)) = 0.5 * sum;
                }
            }
        }
    }
    return cf;
}

}  // namespace emlab
