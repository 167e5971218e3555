#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "emlab/errors.hpp"
#include "emlab/spacetime_metric.hpp"

using namespace emlab;
using Eigen::Matrix4d;

namespace {

Grid4 box(std::initializer_list<int> res, bool periodic = true) {
    Grid4 g;
    int a = 0;
    for (int r : res) g.res[a++] = r;
    for (int i = 0; i < 4; ++i) {
        g.min[i] = i == 0 ? 0.0 : -1.0;
        g.max[i] = 1.0;
        g.periodic[i] = periodic;
    }
    return g;
}

}  // namespace

TEST_CASE("grid4 indexing and quadrature") {
    Grid4 g = box({4, 8, 8, 8});
    g.validate();
    CHECK(g.size() == 4u * 8u * 8u * 8u);

    int c[4];
    g.unpack(g.index(1, 2, 3, 4), c);
    CHECK(c[0] == 1);
    CHECK(c[1] == 2);
    CHECK(c[2] == 3);
    CHECK(c[3] == 4);

    // Ones integrate to the 4-volume: 1 * 2 * 2 * 2.
    const std::vector<double> ones(g.size(), 1.0);
    CHECK(g.integrate(ones) == doctest::Approx(8.0).epsilon(1e-12));

    SUBCASE("non-periodic axes use trapezoid ends") {
        Grid4 r = box({4, 9, 9, 9}, false);
        r.min[0] = 0.25;  // avoid the degenerate t=0 slice for frw reuse
        const std::vector<double> o(r.size(), 1.0);
        CHECK(r.integrate(o) == doctest::Approx(0.75 * 8.0).epsilon(1e-12));
    }
    SUBCASE("frozen axes multiply by their extent") {
        Grid4 f = box({1, 8, 8, 8});
        f.max[0] = 3.0;
        const std::vector<double> o(f.size(), 1.0);
        CHECK(f.integrate(o) == doctest::Approx(24.0).epsilon(1e-12));
    }
}

TEST_CASE("flat spacetime is exactly Minkowski") {
    const SpacetimeMetric sm = flat_spacetime(box({4, 8, 8, 8}));
    const Matrix4d eta = minkowski_eta();
    for (std::size_t n = 0; n < sm.g.size(); ++n) {
        CHECK((sm.g[n] - eta).cwiseAbs().maxCoeff() == 0.0);
        CHECK((sm.g_inv[n] - eta).cwiseAbs().maxCoeff() == 0.0);
        CHECK(sm.sqrt_minus_g[n] == 1.0);
        CHECK(sm.flagged[n] == 0);
    }
}

TEST_CASE("expanding universe slices scale as t squared") {
    Grid4 g = box({16, 6, 6, 6});
    g.min[0] = 0.5;
    g.max[0] = 2.0;
    g.periodic[0] = false;
    for (int a = 1; a < 4; ++a) g.periodic[a] = true;

    const SpacetimeMetric sm = frw_spacetime(g);
    int c[4];
    for (std::size_t n = 0; n < sm.g.size(); ++n) {
        sm.grid.unpack(n, c);
        const double t = sm.grid.coord(0, c[0]);
        CHECK(sm.g[n](0, 0) == doctest::Approx(-1.0));
        CHECK(sm.g[n](1, 1) == doctest::Approx(t * t).epsilon(1e-13));
        CHECK(sm.g[n](2, 2) == doctest::Approx(t * t).epsilon(1e-13));
        CHECK(sm.sqrt_minus_g[n] ==
              doctest::Approx(t * t * t).epsilon(1e-13));
        CHECK(sm.g_inv[n](1, 1) ==
              doctest::Approx(1.0 / (t * t)).epsilon(1e-13));
    }

    SUBCASE("a periodic or non-positive time axis is rejected") {
        Grid4 bad = g;
        bad.periodic[0] = true;
        CHECK_THROWS_AS(frw_spacetime(bad), ConfigError);
        bad = g;
        bad.min[0] = -0.5;
        bad.periodic[0] = false;
        CHECK_THROWS_AS(frw_spacetime(bad), ConfigError);
    }
}

TEST_CASE("conformal and slab metrics follow their closed forms") {
    Grid4 g = box({4, 12, 6, 6});
    g.periodic[1] = false;

    SUBCASE("conformal") {
        const SpacetimeMetric sm = conformal_spacetime(g, 0.2);
        int c[4];
        for (std::size_t n = 0; n < sm.g.size(); ++n) {
            sm.grid.unpack(n, c);
            const double x1 = sm.grid.coord(1, c[1]);
            const double w = std::exp(2.0 * 0.2 * x1);
            CHECK(sm.g[n](1, 1) == doctest::Approx(w).epsilon(1e-13));
            CHECK(sm.g[n](3, 3) == doctest::Approx(w).epsilon(1e-13));
            CHECK(sm.g[n](0, 0) == doctest::Approx(-1.0));
        }
    }
    SUBCASE("slab") {
        const SpacetimeMetric sm = slab_spacetime(g, 0.1);
        int c[4];
        for (std::size_t n = 0; n < sm.g.size(); ++n) {
            sm.grid.unpack(n, c);
            const double x1 = sm.grid.coord(1, c[1]);
            CHECK(sm.g[n](2, 2) ==
                  doctest::Approx(1.0 + 0.2 * x1).epsilon(1e-13));
        }
    }
    SUBCASE("slabs that lose positivity are rejected") {
        CHECK_THROWS_AS(slab_spacetime(g, 0.6), ConfigError);
    }
}

TEST_CASE("weak fields are small, SPD and resolution independent") {
    Grid4 coarse = box({4, 16, 16, 16});
    Grid4 fine = box({4, 32, 32, 32});
    for (Grid4* g : {&coarse, &fine}) {
        g->min[0] = 0.0;
        g->max[0] = 2.0 * M_PI;
        for (int a = 1; a < 4; ++a) {
            g->min[a] = 0.0;
            g->max[a] = 2.0 * M_PI;
        }
    }

    const double eps = 0.1;
    const SpacetimeMetric a = weak_field_spacetime(coarse, eps, 6, 99);
    const SpacetimeMetric b = weak_field_spacetime(fine, eps, 6, 99);

    const Matrix4d eta = minkowski_eta();
    double worst = 0.0;
    for (std::size_t n = 0; n < a.g.size(); ++n) {
        worst = std::max(worst, (a.g[n] - eta).cwiseAbs().maxCoeff());
        CHECK(a.g[n](0, 0) == -1.0);
        CHECK(a.sqrt_minus_g[n] > 0.0);
    }
    CHECK(worst > 1e-3);   // actually perturbed
    CHECK(worst <= eps * 1.000001);  // amplitude bounded by epsilon

    // The same (seed, mode) field sampled on the refined grid matches the
    // coarse nodes exactly: shapes must not depend on the resolution.
    int c[4];
    for (std::size_t n = 0; n < a.g.size(); ++n) {
        a.grid.unpack(n, c);
        const std::size_t m =
            b.grid.index(c[0] * 1, c[1] * 2, c[2] * 2, c[3] * 2);
        // time axis res matches, spatial doubled
        CHECK((a.g[n] - b.g[m]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("metric slices stack into a synchronous spacetime") {
    NeuronEnsemble ens;
    LocalFrame f;
    ens.neurons.push_back(f);
    SpatialGrid sg;
    for (int a = 0; a < 3; ++a) {
        sg.min[a] = -6.0;
        sg.max[a] = 6.0;
        sg.res[a] = 20;
    }
    const MetricField slice = metric_field(ens, sg);
    const SpacetimeMetric sm = stack_slices({slice, slice, slice}, 0.0, 0.5);

    CHECK(sm.grid.res[0] == 3);
    CHECK(sm.grid.res[1] == 20);
    int c[4];
    for (std::size_t n = 0; n < sm.g.size(); ++n) {
        sm.grid.unpack(n, c);
        const std::size_t s = slice.grid.index(c[1], c[2], c[3]);
        if (slice.empty[s]) {
            CHECK(sm.flagged[n] == 1);
            continue;
        }
        CHECK(sm.g[n](0, 0) == -1.0);
        CHECK(sm.g[n](1, 1) == slice.g[s](1, 1));
        CHECK(sm.sqrt_minus_g[n] == slice.sqrt_minus_g[s]);
    }
}
