#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "emlab/errors.hpp"
#include "emlab/fields.hpp"
#include "emlab/wavemap.hpp"

using namespace emlab;

namespace {

GridSpec line(double a, double b, int n, Boundary bc = Boundary::periodic) {
    GridSpec g;
    g.dim = 1;
    g.min = {a, 0.0};
    g.max = {b, 1.0};
    g.res = {n, 1};
    g.boundary = bc;
    return g;
}

// Smooth strictly positive density and a companion smooth potential phase.
void smooth_fields(const GridSpec& g, std::vector<double>& p,
                   std::vector<double>& ftilde) {
    p.resize(g.size());
    ftilde.resize(g.size());
    const double L = g.max[0] - g.min[0];
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        p[i] = std::exp(0.7 * std::cos(2.0 * M_PI * q / L) +
                        0.3 * std::sin(4.0 * M_PI * q / L));
        ftilde[i] = 0.9 * std::sin(2.0 * M_PI * q / L) +
                    0.4 * std::cos(4.0 * M_PI * q / L);
    }
}

}  // namespace

TEST_CASE("the wave squares back to the density at every node") {
    const GridSpec g = line(-3.0, 3.0, 128);
    std::vector<double> p, ftilde;
    smooth_fields(g, p, ftilde);
    DensityField pf;
    pf.grid = g;
    pf.values = p;

    const WaveField w = to_wavefunction(pf, ftilde, 0.7, 0.5);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(std::norm(w.values[i]) - p[i]) <=
              1e-15 * std::max(1.0, p[i]));
}

TEST_CASE("real positive waves carry zero flow") {
    const GridSpec g = line(0.0, 1.0, 64, Boundary::reflecting);
    DensityField pf;
    pf.grid = g;
    pf.values.assign(g.size(), 1.0);
    const std::vector<double> zero(g.size(), 0.0);
    const WaveField w = to_wavefunction(pf, zero, 1.0, 1.0);
    for (auto& v : w.values) CHECK(v == std::complex<double>(1.0, 0.0));

    const WaveDecomposition d = from_wavefunction(w);
    for (double u : d.u.comps[0]) CHECK(u == doctest::Approx(0.0));
}

TEST_CASE("linear phase recovers a constant flow velocity") {
    const GridSpec g = line(0.0, 1.0, 200, Boundary::reflecting);
    const double hbar = 0.5, mass = 0.5, slope = 0.37;
    DensityField pf;
    pf.grid = g;
    pf.values.assign(g.size(), 1.0);
    std::vector<double> ftilde(g.size());
    for (int i = 0; i < g.res[0]; ++i) ftilde[i] = slope * g.coord(0, i);

    const WaveDecomposition d =
        from_wavefunction(to_wavefunction(pf, ftilde, hbar, mass));
    for (int i = 0; i < g.res[0]; ++i)
        CHECK(d.u.comps[0][i] == doctest::Approx(slope / mass).epsilon(1e-8));
}

TEST_CASE("winding phases unwrap across the seam") {
    const GridSpec g = line(-3.0, 3.0, 128);
    const double hbar = 0.5, mass = 0.5;
    const double L = g.max[0] - g.min[0];
    // Three full phase windings around the ring plus a smooth modulation.
    const double k = 3.0 * 2.0 * M_PI / L;
    DensityField pf;
    pf.grid = g;
    pf.values.resize(g.size());
    std::vector<double> ftilde(g.size());
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        pf.values[i] = 1.0 + 0.2 * std::cos(2.0 * M_PI * q / L);
        ftilde[i] = hbar * k * q;
    }

    const WaveDecomposition d =
        from_wavefunction(to_wavefunction(pf, ftilde, hbar, mass));
    // Interior nodes (the seam node sees the 2 pi hbar winding jump).
    for (int i = 1; i < g.res[0] - 1; ++i)
        CHECK(d.u.comps[0][i] ==
              doctest::Approx(hbar * k / mass).epsilon(1e-8));
}

TEST_CASE("roundtrip reproduces the wave up to one global phase") {
    const GridSpec g = line(-3.0, 3.0, 128);
    std::vector<double> p, ftilde;
    smooth_fields(g, p, ftilde);
    DensityField pf;
    pf.grid = g;
    pf.values = p;
    const double hbar = 0.7, mass = 0.5;

    const WaveField w = to_wavefunction(pf, ftilde, hbar, mass);
    const WaveDecomposition d = from_wavefunction(w);
    const WaveField back = to_wavefunction(d.p, d.f_tilde, hbar, mass);

    // Align the global phase on the first node, then compare all.
    const std::complex<double> align =
        w.values[0] / back.values[0] /
        std::abs(w.values[0] / back.values[0]);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst,
                         std::abs(back.values[i] * align - w.values[i]));
    CHECK(worst < 1e-8);
}

TEST_CASE("two dimensional roundtrip holds as well") {
    GridSpec g;
    g.dim = 2;
    g.min = {-2.0, -1.0};
    g.max = {2.0, 1.0};
    g.res = {48, 24};
    g.boundary = Boundary::periodic;
    const double hbar = 0.6, mass = 0.5;

    DensityField pf;
    pf.grid = g;
    pf.values.resize(g.size());
    std::vector<double> ftilde(g.size());
    for (int j = 0; j < g.res[1]; ++j)
        for (int i = 0; i < g.res[0]; ++i) {
            const double x = g.coord(0, i), y = g.coord(1, j);
            pf.values[g.index(i, j)] =
                std::exp(0.4 * std::cos(M_PI * x / 2.0) +
                         0.2 * std::sin(M_PI * y));
            ftilde[g.index(i, j)] = 0.5 * std::sin(M_PI * x / 2.0) +
                                    0.3 * std::cos(M_PI * y);
        }

    const WaveField w = to_wavefunction(pf, ftilde, hbar, mass);
    const WaveDecomposition d = from_wavefunction(w);
    double worst_p = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst_p = std::max(worst_p,
                           std::abs(d.p.values[i] - pf.values[i]));
    CHECK(worst_p < 1e-14);

    const WaveField back = to_wavefunction(d.p, d.f_tilde, hbar, mass);
    const std::complex<double> align =
        w.values[0] / back.values[0] /
        std::abs(w.values[0] / back.values[0]);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst,
                         std::abs(back.values[i] * align - w.values[i]));
    CHECK(worst < 1e-8);
}

TEST_CASE("a node in the wave makes the phase map fail loudly") {
    const GridSpec g = line(-1.0, 1.0, 64);
    WaveField w;
    w.grid = g;
    w.hbar = 1.0;
    w.mass = 1.0;
    w.values.assign(g.size(), std::complex<double>(1.0, 0.0));
    w.values[10] = 0.0;
    CHECK_THROWS_AS(from_wavefunction(w), NodeError);
}

TEST_CASE("negative densities are rejected before the square root") {
    const GridSpec g = line(-1.0, 1.0, 64);
    DensityField pf;
    pf.grid = g;
    pf.values.assign(g.size(), 1.0);
    pf.values[5] = -0.1;
    const std::vector<double> zero(g.size(), 0.0);
    CHECK_THROWS_AS(to_wavefunction(pf, zero, 1.0, 1.0), DomainError);
}
