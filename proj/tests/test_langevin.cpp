#include <doctest.h>

#include <cmath>
#include <vector>

#include "emlab/fields.hpp"
#include "emlab/langevin.hpp"
#include "emlab/rng.hpp"

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

const GradFn harmonic_grad = [](const Eigen::VectorXd& q) { return q; };

}  // namespace

TEST_CASE("zero diffusion contracts replicas geometrically") {
    LearningParams lp;
    lp.gamma = 0.5;
    lp.diffusion = 0.0;
    lp.dt = 0.01;
    lp.n_replicas = 3;
    lp.seed = 1;

    ReplicaEnsemble ens = make_ensemble(3, 1, 2.0);
    const long n = 200;
    langevin_run(ens, harmonic_grad, lp, n);
    const double expected = 2.0 * std::pow(1.0 - lp.gamma * lp.dt, n);
    for (int r = 0; r < 3; ++r)
        CHECK(ens.positions(r, 0) ==
              doctest::Approx(expected).epsilon(1e-12));
    CHECK(ens.step == n);
    CHECK(ens.time == doctest::Approx(n * lp.dt));
}

TEST_CASE("noise streams do not depend on the thread count") {
    LearningParams lp;
    lp.gamma = 1.0;
    lp.diffusion = 0.25;
    lp.dt = 0.005;
    lp.n_replicas = 257;
    lp.seed = 42;

    ReplicaEnsemble a = make_ensemble(257, 2, 0.1);
    ReplicaEnsemble b = make_ensemble(257, 2, 0.1);
    const GradFn grad = [](const Eigen::VectorXd& q) {
        return Eigen::VectorXd(2.0 * q);
    };
    langevin_run(a, grad, lp, 50, 1);
    langevin_run(b, grad, lp, 50, 4);
    CHECK(a.positions == b.positions);

    ReplicaEnsemble c = make_ensemble(257, 2, 0.1);
    LearningParams lp2 = lp;
    lp2.seed = 43;
    langevin_run(c, grad, lp2, 50, 1);
    CHECK(a.positions != c.positions);
}

TEST_CASE("stationary law of the quadratic drift is reached") {
    LearningParams lp;
    lp.gamma = 1.0;
    lp.diffusion = 0.25;
    lp.dt = 0.01;
    lp.n_replicas = 20000;
    lp.seed = 7;

    ReplicaEnsemble ens = make_ensemble(lp.n_replicas, 1, 0.0);
    langevin_run(ens, harmonic_grad, lp, 800);

    // gamma/D = 4: stationary density ~ exp(-2 q^2), variance 1/4.
    const GridSpec g = line(-4.0, 4.0, 128);
    const auto emp = empirical_density(ens, g, 0.08);
    CHECK(emp.mass_deficit < 1e-4);
    CHECK(total_mass(emp.field) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(density_variance(emp.field) == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("empirical density integrates to one and localizes spikes") {
    ReplicaEnsemble ens = make_ensemble(500, 1, 0.37);
    const GridSpec g = line(-1.0, 1.0, 100, Boundary::periodic);

    SUBCASE("histogram of a point mass") {
        const auto emp = empirical_density(ens, g, 0.0);
        CHECK(total_mass(emp.field) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(emp.mass_deficit == doctest::Approx(0.0));
        double mean = 0.0;
        for (int i = 0; i < g.res[0]; ++i)
            mean += g.coord(0, i) * emp.field.values[i];
        mean *= g.cell_volume();
        CHECK(mean == doctest::Approx(0.37).epsilon(0.05));
    }
    SUBCASE("samples outside the box are reported as deficit") {
        ens.positions.topRows(100).setConstant(25.0);
        const auto emp = empirical_density(ens, g, 0.0);
        CHECK(emp.mass_deficit == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(total_mass(emp.field) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("kernel estimate reproduces moments of a normal sample") {
    const int n = 100000;
    ReplicaEnsemble ens = make_ensemble(n, 1, 0.0);
    RngStream rng(314, 0);
    for (int r = 0; r < n; ++r) ens.positions(r, 0) = rng.normal();

    const GridSpec g = line(-6.0, 6.0, 256);
    const auto emp = empirical_density(ens, g, 0.05);
    CHECK(total_mass(emp.field) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(density_variance(emp.field) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("entropy production rate of a static Gaussian is D over sigma^2") {
    const GridSpec g = line(-8.0, 8.0, 400);
    DensityField p;
    p.grid = g;
    p.values.resize(g.size());
    const double sigma = 1.0;
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        p.values[i] = std::exp(-0.5 * q * q / (sigma * sigma));
    }
    normalize(p);

    LearningParams lp;
    lp.gamma = 1.0;
    lp.diffusion = 0.3;
    const std::vector<double> F(g.size(), 0.0);
    CHECK(entropy_production_rate(p, F, lp) ==
          doctest::Approx(lp.diffusion / (sigma * sigma)).epsilon(1e-3));
}

TEST_CASE("drift against the gradient cancels production at stationarity") {
    // At p = exp(-(gamma/D) F)/Z the integrand D(dlogp)^2 + gamma dlogp.dF
    // vanishes pointwise.
    const GridSpec g = line(-5.0, 5.0, 300);
    LearningParams lp;
    lp.gamma = 1.0;
    lp.diffusion = 0.25;
    std::vector<double> F(g.size());
    DensityField p;
    p.grid = g;
    p.values.resize(g.size());
    for (int i = 0; i < g.res[0]; ++i) {
        const double q = g.coord(0, i);
        F[i] = 0.5 * q * q;
        p.values[i] = std::exp(-(lp.gamma / lp.diffusion) * F[i]);
    }
    normalize(p);
    CHECK(std::abs(entropy_production_rate(p, F, lp)) < 1e-4);
}
