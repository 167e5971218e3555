#pragma once

#include <cstdint>
#include <optional>
#include <utility>

namespace emlab {

// Knobs of the stochastic learning dynamics
//   dq = -gamma * dF/dq * dt + sqrt(2 D dt) * xi.
struct LearningParams {
    double gamma = 1.0;
    double diffusion = 0.25;
    double dt = 1e-3;
    int n_replicas = 1;
    std::uint64_t seed = 1;
};

// Derived constants of the emergent wave description.  mass = 1/(2 gamma),
// hbar = sqrt(4 D alpha / gamma - 1) / alpha, mu = sign * 2 pi hbar.
struct QuantumParams {
    double alpha = 1.0;
    double hbar = 1.0;
    double mass = 0.5;
    double mu = 0.0;

    static QuantumParams from(double alpha, double diffusion, double gamma,
                              int mu_sign = +1);
};

// hbar as a function of (alpha, D, gamma).  Domain: 4 D alpha / gamma >= 1.
double hbar_of(double alpha, double diffusion, double gamma);

// Real roots of (mu/2pi)^2 a^2 - (4D/gamma) a + 1 = 0, ordered (minus, plus);
// empty when |2D/gamma| < |mu/2pi|.  mu must be nonzero.
std::optional<std::pair<double, double>> alpha_roots(double diffusion,
                                                     double gamma, double mu);

enum class TuneKnob { gamma, diffusion };

// Bisect the chosen knob until |gamma mu / D| = 4 pi with mu = 2 pi hbar held
// at the target; the returned parameters admit a (double) alpha root.
LearningParams tune_parameters(const LearningParams& lp, double target_hbar,
                               TuneKnob knob);

}  // namespace emlab
