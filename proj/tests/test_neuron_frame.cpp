#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "emlab/errors.hpp"
#include "emlab/neuron_frame.hpp"
#include "emlab/rng.hpp"

using namespace emlab;
using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::Vector3d;
using Eigen::VectorXd;

TEST_CASE("displacements of simple trajectories") {
    NeuronTrajectory tr;
    tr.period = 3;

    SUBCASE("constant trajectory gives zero displacement") {
        tr.samples.assign(12, 4.2);
        for (const auto& d : displacements(tr))
            CHECK(d.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
    SUBCASE("linear ramp gives unit components") {
        for (int t = 0; t < 12; ++t) tr.samples.push_back(double(t));
        const auto ds = displacements(tr);
        REQUIRE(!ds.empty());
        for (const auto& d : ds)
            for (int a = 0; a < d.size(); ++a)
                CHECK(d(a) == doctest::Approx(1.0));
    }
    SUBCASE("exact period-3 cycles cancel") {
        for (int t = 0; t < 12; ++t)
            tr.samples.push_back(double(t % 3));
        for (const auto& d : displacements(tr))
            CHECK(d.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
    SUBCASE("short trajectories are rejected") {
        tr.samples.assign(4, 0.0);
        CHECK_THROWS_AS(displacements(tr), ConfigError);
    }
}

TEST_CASE("the emergent clock integrates the square root") {
    SUBCASE("unit production gives the identity clock") {
        const auto x0 = x0_clock(std::vector<double>(11, 1.0));
        CHECK(x0.front() == doctest::Approx(0.0));
        CHECK(x0.back() == doctest::Approx(10.0));
        CHECK(x0[3] == doctest::Approx(3.0));
    }
    SUBCASE("constant production of four doubles the rate") {
        const auto x0 = x0_clock(std::vector<double>(6, 4.0));
        CHECK(x0.back() == doctest::Approx(10.0));
    }
    SUBCASE("zero production freezes the clock") {
        const auto x0 = x0_clock(std::vector<double>(6, 0.0));
        for (double v : x0) CHECK(v == doctest::Approx(0.0));
    }
    SUBCASE("negative production is rejected") {
        std::vector<double> s(6, 1.0);
        s[2] = -0.25;
        CHECK_THROWS_AS(x0_clock(s), DomainError);
    }
    SUBCASE("the clock never decreases") {
        RngStream rng(17, 0);
        std::vector<double> s(50);
        for (auto& v : s) v = rng.uniform();
        const auto x0 = x0_clock(s, 0.3);
        for (std::size_t i = 1; i < x0.size(); ++i)
            CHECK(x0[i] >= x0[i - 1]);
    }
}

TEST_CASE("entropy production against the flat metric") {
    const Matrix4d eta = minkowski_eta();
    CHECK(entropy_production_neuron(FourVector(1, 1, 0, 0), eta) ==
          doctest::Approx(0.0));
    CHECK(entropy_production_neuron(FourVector(1, 0, 0, 0), eta) ==
          doctest::Approx(1.0));
    CHECK(entropy_production_neuron(FourVector(0, 1, 0, 0), eta) ==
          doctest::Approx(-1.0));

    RngStream rng(23, 0);
    for (int i = 0; i < 20; ++i) {
        FourVector v;
        for (int k = 0; k < 4; ++k) v(k) = 2.0 * rng.uniform() - 1.0;
        const double expected =
            v(0) * v(0) - v(1) * v(1) - v(2) * v(2) - v(3) * v(3);
        CHECK(entropy_production_neuron(v, eta) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("classification splits by the sign with a null band") {
    const Matrix4d eta = minkowski_eta();
    CHECK(classify(FourVector(1, 1, 0, 0), eta) == Causal::null_like);
    CHECK(classify(FourVector(2, 1, 0, 0), eta) == Causal::timelike);
    CHECK(classify(FourVector(1, 2, 0, 0), eta) == Causal::spacelike);
    CHECK(causal_name(Causal::timelike) == std::string("timelike"));
}

TEST_CASE("boosts follow the textbook arithmetic") {
    const LorentzMap b = LorentzMap::boost(Vector3d(0.6, 0.0, 0.0));
    const Matrix4d eta = minkowski_eta();
    const auto [v, g] = lorentz_apply(b, FourVector(1, 0, 0, 0), eta);
    CHECK(v(0) == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(v(1) == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(v(2) == doctest::Approx(0.0));
    CHECK(v(3) == doctest::Approx(0.0));
    CHECK((g - eta).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("maps preserve the quadratic form and composition inverts") {
    RngStream rng(808, 1);
    const Matrix4d eta = minkowski_eta();
    for (int i = 0; i < 50; ++i) {
        Vector3d beta;
        for (int k = 0; k < 3; ++k) beta(k) = 2.0 * rng.uniform() - 1.0;
        if (beta.norm() > 0.93) beta *= 0.93 / beta.norm();
        const LorentzMap map = LorentzMap::boost(beta);

        const Matrix4d gram =
            map.matrix().transpose() * eta * map.matrix();
        CHECK((gram - eta).cwiseAbs().maxCoeff() < 1e-12);
        const Matrix4d prod = map.inverse_matrix() * map.matrix();
        CHECK((prod - Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("entropy production is Lorentz invariant with curved g too") {
    RngStream rng(808, 2);
    const Matrix4d eta = minkowski_eta();
    for (int i = 0; i < 100; ++i) {
        Matrix4d a = Matrix4d::Identity();
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                a(r, c) += 0.3 * (2.0 * rng.uniform() - 1.0);
        const Matrix4d g = a.transpose() * eta * a;

        FourVector v;
        for (int k = 0; k < 4; ++k) v(k) = 2.0 * rng.uniform() - 1.0;
        const double before = entropy_production_neuron(v, g);

        Vector3d dir;
        for (int k = 0; k < 3; ++k) dir(k) = 2.0 * rng.uniform() - 1.0;
        if (dir.norm() == 0.0) dir = Vector3d(1, 0, 0);
        dir.normalize();
        const LorentzMap map = LorentzMap::boost(0.9 * rng.uniform() * dir);

        const auto [v2, g2] = lorentz_apply(map, v, g);
        const double after = entropy_production_neuron(v2, g2);
        CHECK(std::abs(after - before) / std::max(1.0, std::abs(before)) <
              1e-10);
        if (std::abs(before) > 1e-6)
            CHECK(classify(v2, g2) == classify(v, g));
    }
}

TEST_CASE("construction rejects non-Lorentz matrices and fast boosts") {
    CHECK_THROWS_AS(LorentzMap(2.0 * Matrix4d::Identity(),
                               Eigen::Vector4d::Zero()),
                    ConfigError);
    CHECK_THROWS_AS(LorentzMap::boost(Vector3d(1.0, 0.0, 0.0)), DomainError);
}

TEST_CASE("rotations are Lorentz maps that fix the clock axis") {
    const LorentzMap r = LorentzMap::rotation(Vector3d(0, 0, 1), M_PI / 2);
    const auto [v, g] =
        lorentz_apply(r, FourVector(1, 1, 0, 0), minkowski_eta());
    CHECK(v(0) == doctest::Approx(1.0));
    CHECK(std::abs(v(1)) < 1e-12);
    CHECK(std::abs(v(2)) == doctest::Approx(1.0));  // handedness-agnostic
    CHECK((g - minkowski_eta()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("local metric fits recover the generator") {
    RngStream rng(99, 0);

    const auto make_data = [&](const Matrix3d& g, int n,
                               std::vector<VectorXd>& displ,
                               std::vector<double>& destr) {
        displ.clear();
        destr.clear();
        for (int i = 0; i < n; ++i) {
            VectorXd d(3);
            for (int k = 0; k < 3; ++k) d(k) = 2.0 * rng.uniform() - 1.0;
            displ.push_back(d);
            destr.push_back(-d.transpose() * g * d);
        }
    };

    std::vector<VectorXd> displ;
    std::vector<double> destr;

    SUBCASE("identity") {
        make_data(Matrix3d::Identity(), 40, displ, destr);
        const Matrix3d fit = fit_local_metric(displ, destr);
        CHECK((fit - Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("anisotropic diagonal") {
        Matrix3d g = Matrix3d::Zero();
        g.diagonal() << 1.0, 2.0, 3.0;
        make_data(g, 40, displ, destr);
        const Matrix3d fit = fit_local_metric(displ, destr);
        CHECK((fit - g).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("dense SPD with noise stays close") {
        Matrix3d a;
        a << 1.0, 0.2, 0.1, 0.0, 1.1, 0.3, 0.0, 0.0, 0.9;
        const Matrix3d g = a.transpose() * a;
        make_data(g, 500, displ, destr);
        for (auto& s : destr) s += 1e-4 * (2.0 * rng.uniform() - 1.0);
        const Matrix3d fit = fit_local_metric(displ, destr);
        CHECK((fit - g).cwiseAbs().maxCoeff() < 1e-2);
    }
    SUBCASE("degenerate designs are reported") {
        for (int i = 0; i < 10; ++i) {
            displ.push_back(VectorXd::Zero(3));
            destr.push_back(0.0);
        }
        CHECK_THROWS_AS(fit_local_metric(displ, destr), RankDeficientError);
    }
}

TEST_CASE("sigma plus estimates are non-negative") {
    RngStream rng(5, 0);
    std::vector<double> samples(100);
    for (auto& s : samples) s = rng.normal();
    const auto est = sigma_plus_estimate(samples);
    REQUIRE(!est.empty());
    for (double v : est) CHECK(v >= 0.0);
}
