#include <doctest.h>

#include <cmath>
#include <vector>

#include "emlab/errors.hpp"
#include "emlab/fields.hpp"

using namespace emlab;

namespace {

GridSpec line(double a, double b, int n, Boundary bc) {
    GridSpec g;
    g.dim = 1;
    g.min = {a, 0.0};
    g.max = {b, 1.0};
    g.res = {n, 1};
    g.boundary = bc;
    return g;
}

DensityField gaussian1d(const GridSpec& g, double mu, double sigma) {
    DensityField p;
    p.grid = g;
    p.values.resize(g.size());
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        p.values[i] = std::exp(-0.5 * (q - mu) * (q - mu) / (sigma * sigma));
    }
    normalize(p);
    return p;
}

}  // namespace

TEST_CASE("grid validation enforces the supported envelope") {
    GridSpec g = line(0.0, 1.0, 64, Boundary::reflecting);
    CHECK_NOTHROW(g.validate());
    g.res[0] = 8;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.res[0] = 64;
    g.max[0] = g.min[0];
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.max[0] = 1.0;
    g.dim = 3;
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("spacing and coordinates depend on the boundary type") {
    const GridSpec r = line(0.0, 1.0, 21, Boundary::reflecting);
    CHECK(r.spacing(0) == doctest::Approx(0.05));
    CHECK(r.coord(0, 20) == doctest::Approx(1.0));

    const GridSpec p = line(0.0, 1.0, 20, Boundary::periodic);
    CHECK(p.spacing(0) == doctest::Approx(0.05));
    CHECK(p.coord(0, 19) == doctest::Approx(0.95));
}

TEST_CASE("quadrature of ones returns the box volume") {
    std::vector<double> ones;

    const GridSpec r = line(-2.0, 3.0, 51, Boundary::reflecting);
    ones.assign(r.size(), 1.0);
    CHECK(r.integrate(ones) == doctest::Approx(5.0).epsilon(1e-13));

    const GridSpec p = line(-2.0, 3.0, 50, Boundary::periodic);
    ones.assign(p.size(), 1.0);
    CHECK(p.integrate(ones) == doctest::Approx(5.0).epsilon(1e-13));

    GridSpec q = p;
    q.dim = 2;
    q.min = {0.0, 0.0};
    q.max = {2.0, 3.0};
    q.res = {16, 24};
    ones.assign(q.size(), 1.0);
    CHECK(q.integrate(ones) == doctest::Approx(6.0).epsilon(1e-13));
}

TEST_CASE("normalize gives unit mass and rejects empty fields") {
    const GridSpec g = line(-4.0, 4.0, 128, Boundary::reflecting);
    DensityField p = gaussian1d(g, 0.0, 0.8);
    CHECK(total_mass(p) == doctest::Approx(1.0).epsilon(1e-13));

    DensityField zero;
    zero.grid = g;
    zero.values.assign(g.size(), 0.0);
    CHECK_THROWS_AS(normalize(zero), NumericError);
}

TEST_CASE("compare_densities is an L1 distance") {
    const GridSpec g = line(-1.0, 1.0, 200, Boundary::periodic);
    DensityField a, b;
    a.grid = b.grid = g;
    a.values.assign(g.size(), 0.0);
    b.values.assign(g.size(), 0.0);

    // Disjoint unit spikes: total variation saturates at 2.
    const double w = g.cell_volume();
    a.values[20] = 1.0 / w;
    b.values[150] = 1.0 / w;
    CHECK(compare_densities(a, a) == doctest::Approx(0.0));
    CHECK(compare_densities(a, b) == doctest::Approx(2.0).epsilon(1e-12));

    DensityField other;
    other.grid = line(-1.0, 1.0, 100, Boundary::periodic);
    other.values.assign(other.grid.size(), 1.0);
    CHECK_THROWS_AS(compare_densities(a, other), ConfigError);
}

TEST_CASE("L1 distance of slightly shifted Gaussians matches closed form") {
    // For a shift d << sigma, the L1 distance tends to
    // 2 erf(d / (2 sqrt(2) sigma)) ~ d sqrt(2/pi) / sigma.
    const GridSpec g = line(-8.0, 8.0, 2000, Boundary::reflecting);
    const double sigma = 1.0, shift = 0.1;
    const DensityField a = gaussian1d(g, 0.0, sigma);
    const DensityField b = gaussian1d(g, shift, sigma);
    const double exact = 2.0 * std::erf(shift / (2.0 * std::sqrt(2.0) * sigma));
    CHECK(compare_densities(a, b) == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("entropy of simple laws matches closed forms") {
    const GridSpec g = line(0.0, 4.0, 400, Boundary::periodic);
    DensityField u;
    u.grid = g;
    u.values.assign(g.size(), 0.25);
    CHECK(shannon_entropy(u) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    const GridSpec gg = line(-10.0, 10.0, 1000, Boundary::reflecting);
    const double sigma = 1.3;
    const DensityField n = gaussian1d(gg, 0.0, sigma);
    const double exact = 0.5 * std::log(2.0 * M_PI * M_E * sigma * sigma);
    CHECK(shannon_entropy(n) == doctest::Approx(exact).epsilon(1e-5));
    CHECK(density_variance(n) ==
          doctest::Approx(sigma * sigma).epsilon(1e-6));
}

TEST_CASE("gradient_axis differentiates smooth fields at second order") {
    const GridSpec g = line(0.0, 2.0 * M_PI, 128, Boundary::periodic);
    std::vector<double> f(g.size()), exact(g.size());
    for (int i = 0; i < g.res[0]; ++i) {
        f[i] = std::sin(g.coord(0, i));
        exact[i] = std::cos(g.coord(0, i));
    }
    const auto d = gradient_axis(g, f, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        worst = std::max(worst, std::abs(d[i] - exact[i]));
    const double h = g.spacing(0);
    CHECK(worst < h * h);  // |sin'''| <= 1, so error <= h^2/6

    // Halving the spacing divides the error by about four.
    const GridSpec g2 = line(0.0, 2.0 * M_PI, 256, Boundary::periodic);
    std::vector<double> f2(g2.size());
    for (int i = 0; i < g2.res[0]; ++i) f2[i] = std::sin(g2.coord(0, i));
    const auto d2 = gradient_axis(g2, f2, 0);
    double worst2 = 0.0;
    for (int i = 0; i < g2.res[0]; ++i)
        worst2 = std::max(worst2,
                          std::abs(d2[i] - std::cos(g2.coord(0, i))));
    CHECK(worst / worst2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("potential samples follow the evaluator") {
    PotentialSpec pot;
    pot.evaluate = [](double q, double) { return q * q; };
    const GridSpec g = line(-1.0, 1.0, 21, Boundary::reflecting);
    const auto v = pot.sample(g);
    REQUIRE(v.size() == g.size());
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[10] == doctest::Approx(0.0));
}
