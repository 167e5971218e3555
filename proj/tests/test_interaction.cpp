#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "emlab/errors.hpp"
#include "emlab/interaction.hpp"
#include "emlab/spacetime_field.hpp"

using namespace emlab;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

SpatialGrid box(double half, int res) {
    SpatialGrid g;
    for (int a = 0; a < 3; ++a) {
        g.min[a] = -half;
        g.max[a] = half;
        g.res[a] = res;
    }
    return g;
}

NeuronEnsemble shared_window_ensemble() {
    Matrix3d G;
    G << 1.4, 0.2, 0.0,
         0.2, 1.1, -0.1,
         0.0, -0.1, 0.9;
    NeuronEnsemble ens;
    for (int i = 0; i < 5; ++i) {
        LocalFrame f;
        f.g_spatial = G;
        f.position = Vector3d(0.5 * i - 1.0, 0.3 - 0.2 * i, 0.1 * i);
        ens.neurons.push_back(f);
    }
    return ens;
}

}  // namespace

TEST_CASE("one shared window matrix balances production exactly") {
    const NeuronEnsemble ens = shared_window_ensemble();
    const SpatialGrid grid = box(8.0, 40);
    const MetricField mf = metric_field(ens, grid);

    const auto rep = interaction_entropy(ens, mf, 20000, 12345);
    CHECK(rep.n_samples == 20000);
    CHECK(rep.field.size() == grid.size());
    CHECK(std::abs(rep.balance_residual) < 1e-9);
    CHECK(rep.moment_error < 0.05);

    // total is the quadrature of the reported integrand
    double quad = 0.0;
    for (int i = 0; i < grid.res[0]; ++i)
        for (int j = 0; j < grid.res[1]; ++j)
            for (int k = 0; k < grid.res[2]; ++k)
                quad += rep.field[grid.index(i, j, k)] * grid.quad_weight(i, j, k);
    CHECK(rep.total == doctest::Approx(quad).epsilon(1e-12));
    CHECK(std::isfinite(rep.total));
}

TEST_CASE("reports are reproducible from the seed") {
    const NeuronEnsemble ens = shared_window_ensemble();
    const SpatialGrid grid = box(8.0, 24);
    const MetricField mf = metric_field(ens, grid);

    const auto a = interaction_entropy(ens, mf, 4000, 77);
    const auto b = interaction_entropy(ens, mf, 4000, 77);
    CHECK(a.total == b.total);
    CHECK(a.balance_residual == b.balance_residual);
    CHECK(a.moment_error == b.moment_error);
    REQUIRE(a.field.size() == b.field.size());
    bool same = true;
    for (std::size_t i = 0; i < a.field.size(); ++i)
        same = same && a.field[i] == b.field[i];
    CHECK(same);

    const auto c = interaction_entropy(ens, mf, 4000, 78);
    CHECK(a.moment_error != c.moment_error);
}

TEST_CASE("mixed windows stay near balance close to equilibrium") {
    const NeuronEnsemble ens = perturbed_ensemble(12, 0.05, 4, 1.5);
    const SpatialGrid grid = box(8.0, 32);
    const MetricField mf = metric_field(ens, grid);

    const auto rep = interaction_entropy(ens, mf, 10000, 5);
    CHECK(std::isfinite(rep.total));
    CHECK(std::isfinite(rep.balance_residual));
    CHECK(rep.moment_error < 0.1);
}

TEST_CASE("velocity sampling needs at least two draws") {
    const NeuronEnsemble ens = shared_window_ensemble();
    const SpatialGrid grid = box(8.0, 24);
    const MetricField mf = metric_field(ens, grid);
    CHECK_THROWS_AS(interaction_entropy(ens, mf, 1, 9), ConfigError);
}
