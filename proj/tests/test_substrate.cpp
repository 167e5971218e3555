#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "emlab/errors.hpp"
#include "emlab/substrate.hpp"

using namespace emlab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Septuple two_neuron_swap() {
    Septuple s;
    s.n = 2;
    s.boundary_mask = Eigen::VectorXi::Zero(2);
    s.boundary_mask(0) = 1;
    s.weights = MatrixXd::Zero(2, 2);
    s.weights(0, 1) = 1.0;
    s.weights(1, 0) = 1.0;
    s.bias = VectorXd::Zero(2);
    return s;
}

// One boundary neuron, no coupling: the residual is the state itself.
Septuple free_boundary_neuron() {
    Septuple s;
    s.n = 1;
    s.boundary_mask = Eigen::VectorXi::Ones(1);
    s.weights = MatrixXd::Zero(1, 1);
    s.bias = VectorXd::Zero(1);
    BoundarySource::Component comp;
    comp.mean = VectorXd::Zero(1);
    comp.sigma = VectorXd::Ones(1);
    s.boundary_source.components.push_back(comp);
    return s;
}

}  // namespace

TEST_CASE("step_network applies the update map") {
    Septuple s = two_neuron_swap();
    NetworkState st;
    st.x = VectorXd(2);
    st.x << 1.0, 2.0;

    SUBCASE("identity activation swaps the pair") {
        const NetworkState out = step_network(s, st);
        CHECK(out.x(0) == doctest::Approx(2.0));
        CHECK(out.x(1) == doctest::Approx(1.0));
        CHECK(out.t == st.t + 1);
    }
    SUBCASE("tanh activation") {
        s.activation = Activation::tanh_fn;
        s.weights.setIdentity();
        st.x = VectorXd::Constant(2, 0.5);
        const NetworkState out = step_network(s, st);
        CHECK(out.x(0) == doctest::Approx(0.46211715726000974).epsilon(1e-14));
    }
    SUBCASE("relu activation clips negatives") {
        s.activation = Activation::relu;
        s.weights << 1.0, -1.0, 0.0, 1.0;
        const NetworkState out = step_network(s, st);
        CHECK(out.x(0) == 0.0);
        CHECK(out.x(1) == doctest::Approx(2.0));
    }
}

TEST_CASE("losses split the squared residual by projector") {
    Septuple s = two_neuron_swap();
    s.weights.setZero();
    NetworkState st;
    st.x = VectorXd(2);
    st.x << 1.0, 3.0;

    // r = x - f(0) = x: boundary keeps component 0 only.
    CHECK(boundary_loss(s, st) == doctest::Approx(0.5));
    CHECK(bulk_loss(s, st) == doctest::Approx(5.0));

    const auto V = [](const VectorXd& x) { return x.squaredNorm(); };
    CHECK(bulk_loss(s, st, V) == doctest::Approx(10.0));

    st.x.setZero();
    CHECK(boundary_loss(s, st) == doctest::Approx(0.0));
}

TEST_CASE("trainable packing round-trips") {
    Septuple s = two_neuron_swap();
    s.bias << 0.5, -0.25;
    s.weights << 1.0, 2.0, 3.0, 4.0;
    const VectorXd q = pack_trainable(s);
    REQUIRE(q.size() == 6);
    const Septuple back = apply_trainable(s, q);
    CHECK(back.bias == s.bias);
    CHECK(back.weights == s.weights);
}

TEST_CASE("free energy of a constant loss is minus the loss") {
    Septuple s = free_boundary_neuron();
    // Force a constant residual by feeding a fixed sample table.
    s.boundary_source.components.clear();
    VectorXd fixed(1);
    fixed << 2.0;
    s.boundary_source.samples.push_back(fixed);
    const VectorXd q = pack_trainable(s);
    const auto r = free_energy(s, q, 64, 99);
    CHECK(r.value == doctest::Approx(-2.0).epsilon(1e-12));  // H = x^2/2 = 2
    CHECK(r.std_error == doctest::Approx(0.0));
}

TEST_CASE("log-sum-exp guard survives huge beta H") {
    Septuple s = free_boundary_neuron();
    s.beta = 1e3;
    s.boundary_source.components.clear();
    VectorXd fixed(1);
    fixed << std::sqrt(2.0);  // H = 1, beta H = 1000
    s.boundary_source.samples.push_back(fixed);
    const auto r = free_energy(s, pack_trainable(s), 16, 5);
    CHECK(std::isfinite(r.value));
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("free energy of the Gaussian quadratic matches -log(2)/2") {
    Septuple s = free_boundary_neuron();
    // H = x^2/2 with x standard normal and beta = 1:
    // E[exp(-H)] = 1/sqrt(2), so F = -log(2)/2.
    const auto r = free_energy(s, pack_trainable(s), 400000, 31);
    CHECK(r.value ==
          doctest::Approx(-0.5 * std::log(2.0)).epsilon(5e-3));
    CHECK(r.std_error > 0.0);
    CHECK(r.std_error < 2e-3);
}

TEST_CASE("free energy reuses samples for identical seeds") {
    Septuple s = free_boundary_neuron();
    const VectorXd q = pack_trainable(s);
    const auto a = free_energy(s, q, 1000, 77);
    const auto b = free_energy(s, q, 1000, 77);
    CHECK(a.value == b.value);
    const auto c = free_energy(s, q, 1000, 78);
    CHECK(a.value != c.value);
}

TEST_CASE("gradient equals a manual common-random-number difference") {
    Septuple s = free_boundary_neuron();
    VectorXd q = pack_trainable(s);
    q(0) = 0.3;
    const double h = 1e-4;
    const VectorXd g = free_energy_gradient(s, q, h, 2000, 11);
    REQUIRE(g.size() == q.size());

    VectorXd qp = q, qm = q;
    qp(0) += h;
    qm(0) -= h;
    const double manual = (free_energy(s, qp, 2000, 11).value -
                           free_energy(s, qm, 2000, 11).value) /
                          (2.0 * h);
    CHECK(g(0) == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("boundary draws cycle an explicit sample table") {
    BoundarySource src;
    VectorXd a(1), b(1);
    a << 1.0;
    b << 2.0;
    src.samples = {a, b};
    CHECK(draw_boundary(src, 1, 0, 0)(0) == doctest::Approx(1.0));
    CHECK(draw_boundary(src, 1, 0, 1)(0) == doctest::Approx(2.0));
    CHECK(draw_boundary(src, 1, 0, 2)(0) == doctest::Approx(1.0));
}

TEST_CASE("septuple validation rejects malformed systems") {
    Septuple s = two_neuron_swap();
    s.weights = MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(s.validate(), ConfigError);

    Septuple t = two_neuron_swap();
    t.beta = 0.0;
    CHECK_THROWS_AS(t.validate(), ConfigError);

    Septuple u = free_boundary_neuron();
    CHECK_THROWS_AS(free_energy(u, pack_trainable(u), 0, 1), ConfigError);
}
