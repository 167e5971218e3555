#include <doctest.h>

#include <cmath>
#include <vector>

#include "emlab/errors.hpp"
#include "emlab/fokker_planck.hpp"
#include "emlab/langevin.hpp"

using namespace emlab;

namespace {

GridSpec line(double a, double b, int n,
              Boundary bc = Boundary::reflecting) {
    GridSpec g;
    g.dim = 1;
    g.min = {a, 0.0};
    g.max = {b, 1.0};
    g.res = {n, 1};
    g.boundary = bc;
    return g;
}

std::vector<double> harmonic_F(const GridSpec& g) {
    std::vector<double> F(g.size());
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        F[i] = 0.5 * q * q;
    }
    return F;
}

DensityField gaussian(const GridSpec& g, double sigma) {
    DensityField p;
    p.grid = g;
    p.values.resize(g.size());
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        p.values[i] = std::exp(-0.5 * q * q / (sigma * sigma));
    }
    normalize(p);
    return p;
}

}  // namespace

TEST_CASE("uniform density with a constant drive is a fixed point") {
    const GridSpec g = line(-1.0, 1.0, 64, Boundary::periodic);
    DensityField p;
    p.grid = g;
    p.values.assign(g.size(), 0.5);
    const std::vector<double> F(g.size(), 3.0);
    LearningParams lp;
    lp.dt = fp_stable_dt(g, F, lp);

    const DensityField out = fp_step(p, F, lp);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        CHECK(out.values[i] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(out.time == doctest::Approx(lp.dt));
}

TEST_CASE("pure diffusion spreads a Gaussian like the heat kernel") {
    const GridSpec g = line(-6.0, 6.0, 400);
    const std::vector<double> F(g.size(), 0.0);
    LearningParams lp;
    lp.gamma = 1.0;
    lp.diffusion = 0.25;
    lp.dt = fp_stable_dt(g, F, lp);

    DensityField p = gaussian(g, 0.5);
    const double v0 = density_variance(p);
    for (int s = 0; s < 100; ++s) p = fp_step(p, F, lp);
    const double expected = v0 + 2.0 * lp.diffusion * 100 * lp.dt;
    CHECK(density_variance(p) == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("mass is conserved step by step") {
    LearningParams lp;
    lp.gamma = 1.0;
    lp.diffusion = 0.25;

    SUBCASE("periodic") {
        const GridSpec g = line(-3.0, 3.0, 128, Boundary::periodic);
        std::vector<double> F = harmonic_F(g);
        lp.dt = fp_stable_dt(g, F, lp);
        DensityField p = gaussian(g, 0.7);
        for (int s = 0; s < 200; ++s) p = fp_step(p, F, lp);
        CHECK(total_mass(p) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("reflecting") {
        const GridSpec g = line(-3.0, 3.0, 129);
        std::vector<double> F = harmonic_F(g);
        lp.dt = fp_stable_dt(g, F, lp);
        DensityField p = gaussian(g, 0.7);
        for (int s = 0; s < 200; ++s) p = fp_step(p, F, lp);
        CHECK(total_mass(p) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("oversized steps are rejected with a suggestion") {
    const GridSpec g = line(-2.0, 2.0, 64);
    const std::vector<double> F = harmonic_F(g);
    LearningParams lp;
    lp.dt = 10.0 * fp_stable_dt(g, F, lp);
    const DensityField p = gaussian(g, 0.5);
    CHECK_THROWS_AS(fp_step(p, F, lp), StabilityError);
    lp.dt = 0.5 * fp_stable_dt(g, F, lp);
    CHECK_NOTHROW(fp_step(p, F, lp));
}

TEST_CASE("relaxation reaches the Gibbs law of the drive") {
    const GridSpec g = line(-4.0, 4.0, 256);
    const std::vector<double> F = harmonic_F(g);
    LearningParams lp;
    lp.gamma = 1.0;
    lp.diffusion = 0.25;
    lp.dt = fp_stable_dt(g, F, lp);

    const DensityField target = fp_stationary(g, F, lp);
    CHECK(total_mass(target) == doctest::Approx(1.0).epsilon(1e-12));

    // exp(-(gamma/D) F) = exp(-2 q^2) up to normalization.
    const double mid = target.values[g.res[0] / 2];
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        CHECK(target.values[i] ==
              doctest::Approx(mid * std::exp(-2.0 * q * q) /
                              std::exp(-2.0 * g.coord(0, g.res[0] / 2) *
                                       g.coord(0, g.res[0] / 2)))
                  .epsilon(1e-10));
    }

    DensityField p;
    p.grid = g;
    p.values.assign(g.size(), 1.0);
    normalize(p);
    const long n_steps = static_cast<long>(std::ceil(30.0 / lp.dt));
    for (long s = 0; s < n_steps; ++s) p = fp_step(p, F, lp);
    CHECK(compare_densities(p, target) < 1e-3);
}

TEST_CASE("entropy production integrates to the entropy change") {
    const GridSpec g = line(-5.0, 5.0, 400);
    const std::vector<double> F(g.size(), 0.0);
    LearningParams lp;
    lp.gamma = 1.0;
    lp.diffusion = 0.25;
    lp.dt = fp_stable_dt(g, F, lp);

    DensityField p = gaussian(g, 0.6);
    std::vector<DensityField> snaps{p};
    const long n_steps = 160;
    for (long s = 0; s < n_steps; ++s) {
        p = fp_step(p, F, lp);
        snaps.push_back(p);
    }
    const double direct =
        shannon_entropy(snaps.back()) - shannon_entropy(snaps.front());
    const double integrated =
        entropy_production_trainable(snaps, {F}, lp);
    CHECK(std::abs(integrated - direct) < 1e-3);
}
