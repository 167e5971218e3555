#include <doctest.h>

#include <cmath>
#include <vector>

#include "emlab/errors.hpp"
#include "emlab/fields.hpp"
#include "emlab/madelung.hpp"
#include "emlab/schrodinger.hpp"

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

MadelungState rest_gaussian(const GridSpec& g, double sigma) {
    MadelungState st;
    st.p.grid = g;
    st.p.values.resize(g.size());
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        st.p.values[i] = std::exp(-0.5 * q * q / (sigma * sigma));
    }
    normalize(st.p);
    st.u.grid = g;
    st.u.comps[0].assign(g.size(), 0.0);
    return st;
}

}  // namespace

TEST_CASE("uniform resting fluid is an exact fixed point") {
    const GridSpec g = line(-1.0, 1.0, 64);
    MadelungState st;
    st.p.grid = g;
    st.p.values.assign(g.size(), 0.5);
    st.u.grid = g;
    st.u.comps[0].assign(g.size(), 0.0);
    const std::vector<double> V(g.size(), 1.7);
    const QuantumParams qp = QuantumParams::from(2.0, 0.25, 1.0);

    const MadelungState out =
        madelung_step(st, V, qp, 0.5 * madelung_stable_dt(st, qp));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(out.p.values[i] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(out.u.comps[0][i] == doctest::Approx(0.0));
    }
}

TEST_CASE("harmonic ground state is stationary node by node") {
    const GridSpec g = line(-6.0, 6.0, 512, Boundary::reflecting);
    const QuantumParams qp = QuantumParams::from(2.0, 0.25, 1.0);
    // hbar = 0.5, mass = 0.5 here; pick omega = 1 so sigma^2 = hbar/(2 m).
    const double omega = 1.0;
    const double sigma = std::sqrt(qp.hbar / (2.0 * qp.mass * omega));
    MadelungState st = rest_gaussian(g, sigma);
    std::vector<double> V(g.size());
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        V[i] = 0.5 * qp.mass * omega * omega * q * q;
    }

    const double dt = 0.5 * madelung_stable_dt(st, qp);
    const MadelungState out = madelung_step(st, V, qp, dt);

    double du = 0.0, dp = 0.0;
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        if (std::abs(q) > 4.0) continue;  // quantum-potential stencil error
                                          // is tail-dominated
        du = std::max(du, std::abs(out.u.comps[0][i]));
        dp = std::max(dp, std::abs(out.p.values[i] - st.p.values[i]));
    }
    CHECK(du < 1e-6);
    CHECK(dp < 1e-8);
}

TEST_CASE("free packet spreads like the wave solution") {
    const GridSpec g = line(-8.0, 8.0, 256);
    const QuantumParams qp = QuantumParams::from(2.0, 0.25, 1.0);
    const double sigma = 0.8;
    MadelungState st = rest_gaussian(g, sigma);
    const std::vector<double> V(g.size(), 0.0);

    WaveField w;
    w.grid = g;
    w.hbar = qp.hbar;
    w.mass = qp.mass;
    w.values.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        w.values[i] = std::sqrt(st.p.values[i]);

    const double t_quarter =
        0.5 * qp.mass * sigma * sigma / qp.hbar;  // variance factor 1.0625
    const double dt =
        t_quarter / std::ceil(t_quarter / (0.5 * madelung_stable_dt(st, qp)));
    const long n = std::lround(t_quarter / dt);

    const MadelungState fluid = madelung_run(st, V, qp, dt, n);
    const WaveField wave = schrodinger_run(w, V, dt, n);

    DensityField wave_p = wave_density(wave);
    normalize(wave_p);
    CHECK(compare_densities(fluid.p, wave_p) < 1e-2);
    CHECK(total_mass(fluid.p) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("density floor violations raise the node error") {
    const GridSpec g = line(-1.0, 1.0, 64);
    MadelungState st;
    st.p.grid = g;
    st.p.values.assign(g.size(), 1.0);
    st.p.values[30] = 1e-280;  // below the positivity floor
    st.u.grid = g;
    st.u.comps[0].assign(g.size(), 0.0);
    const std::vector<double> V(g.size(), 0.0);
    const QuantumParams qp = QuantumParams::from(2.0, 0.25, 1.0);
    CHECK_THROWS_AS(madelung_step(st, V, qp, 1e-5), NodeError);
}

TEST_CASE("steps beyond the dispersive bound are rejected") {
    const GridSpec g = line(-2.0, 2.0, 128);
    MadelungState st = rest_gaussian(g, 0.5);
    const std::vector<double> V(g.size(), 0.0);
    const QuantumParams qp = QuantumParams::from(2.0, 0.25, 1.0);
    const double dt = madelung_stable_dt(st, qp);
    CHECK_THROWS_AS(madelung_step(st, V, qp, 10.0 * dt), StabilityError);
    CHECK_NOTHROW(madelung_step(st, V, qp, 0.5 * dt));
}
