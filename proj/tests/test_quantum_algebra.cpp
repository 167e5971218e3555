#include <doctest.h>

#include <cmath>

#include "emlab/errors.hpp"
#include "emlab/quantum_algebra.hpp"
#include "emlab/rng.hpp"

using namespace emlab;

TEST_CASE("alpha roots of the unit-ratio case are 2 +/- sqrt(3)") {
    const auto roots = alpha_roots(1.0, 1.0, 2.0 * M_PI);
    REQUIRE(roots.has_value());
    CHECK(roots->first == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-14));
    CHECK(roots->second == doctest::Approx(2.0 + std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("root pairs obey the Vieta product and the quadratic itself") {
    RngStream rng(404, 0);
    for (int i = 0; i < 200; ++i) {
        const double D = 0.05 + 0.95 * rng.uniform();
        const double gamma = 0.1 + 1.9 * rng.uniform();
        // mu below the double-root threshold so real roots exist.
        const double frac = 0.05 + 0.9 * rng.uniform();
        const double mu = frac * 4.0 * M_PI * D / gamma;

        const auto roots = alpha_roots(D, gamma, mu);
        REQUIRE(roots.has_value());
        const double k2 = (mu / (2.0 * M_PI)) * (mu / (2.0 * M_PI));
        const double b = 4.0 * D / gamma;
        for (const double a : {roots->first, roots->second}) {
            const double res = k2 * a * a - b * a + 1.0;
            const double scale = k2 * a * a + b * a + 1.0;
            CHECK(std::abs(res) / scale < 1e-12);
        }
        CHECK(roots->first * roots->second ==
              doctest::Approx(1.0 / k2).epsilon(1e-12));
        CHECK(roots->first <= roots->second);
    }
}

TEST_CASE("no real roots beyond the saturation line") {
    // |2D/gamma| < |mu/2pi| leaves the quadratic without real solutions.
    CHECK_FALSE(alpha_roots(0.25, 1.0, 2.0 * M_PI * 0.6).has_value());
    CHECK_THROWS_AS(alpha_roots(0.25, 1.0, 0.0), DomainError);
}

TEST_CASE("hbar closed forms") {
    CHECK(hbar_of(1.0, 1.0, 1.0) ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(hbar_of(1.0, 0.25, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(hbar_of(1.0, 0.2, 1.0), DomainError);

    // Every root maps back to |mu| / 2 pi.
    const double D = 0.7, gamma = 1.3, mu = 0.5 * 4.0 * M_PI * D / gamma;
    const auto roots = alpha_roots(D, gamma, mu);
    REQUIRE(roots.has_value());
    CHECK(hbar_of(roots->first, D, gamma) ==
          doctest::Approx(mu / (2.0 * M_PI)).epsilon(1e-10));
    CHECK(hbar_of(roots->second, D, gamma) ==
          doctest::Approx(mu / (2.0 * M_PI)).epsilon(1e-10));
}

TEST_CASE("derived wave constants") {
    const QuantumParams qp = QuantumParams::from(2.0, 0.25, 1.0, -1);
    CHECK(qp.alpha == 2.0);
    CHECK(qp.mass == doctest::Approx(0.5));
    CHECK(qp.hbar == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(qp.mu == doctest::Approx(-2.0 * M_PI * 0.5).epsilon(1e-14));
}

TEST_CASE("tuner saturates the uncertainty bound") {
    LearningParams lp;
    lp.gamma = 1.0;
    lp.diffusion = 1.0;

    SUBCASE("diffusion knob") {
        const LearningParams out = tune_parameters(lp, 1.0, TuneKnob::diffusion);
        CHECK(out.gamma == doctest::Approx(1.0));
        CHECK(out.diffusion == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("gamma knob") {
        const LearningParams out = tune_parameters(lp, 1.0, TuneKnob::gamma);
        CHECK(out.diffusion == doctest::Approx(1.0));
        CHECK(out.gamma == doctest::Approx(2.0).epsilon(1e-9));
    }
}

TEST_CASE("tuned parameters sit on the double-root line") {
    RngStream rng(55, 0);
    for (int i = 0; i < 20; ++i) {
        LearningParams lp;
        lp.gamma = 0.2 + 1.8 * rng.uniform();
        lp.diffusion = 0.1 + 0.9 * rng.uniform();
        const double target = 0.3 + 1.2 * rng.uniform();
        const LearningParams out =
            tune_parameters(lp, target, TuneKnob::diffusion);

        const double mu = 2.0 * M_PI * target;
        const double saturation = std::abs(out.gamma * mu / out.diffusion);
        CHECK(std::abs(saturation - 4.0 * M_PI) / (4.0 * M_PI) < 1e-9);

        // The quadratic discriminant collapses: b^2 - 4 k2 ~ 0.
        const double k2 = (mu / (2.0 * M_PI)) * (mu / (2.0 * M_PI));
        const double b = 4.0 * out.diffusion / out.gamma;
        CHECK(std::abs(b * b - 4.0 * k2) / (b * b + 4.0 * k2) < 1e-8);
    }
}
