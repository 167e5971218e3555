#include "emlab/quantum_algebra.hpp"

#include <cmath>

#include "emlab/errors.hpp"

namespace emlab {

double hbar_of(double alpha, double diffusion, double gamma) {
    if (alpha == 0.0 || gamma == 0.0)
        throw DomainError("hbar_of: alpha and gamma must be nonzero");
    const double arg = 4.0 * diffusion * alpha / gamma - 1.0;
    if (arg < 0.0)
        throw DomainError("hbar_of: 4 D alpha / gamma < 1");
    return std::sqrt(arg) / alpha;
}

QuantumParams QuantumParams::from(double alpha, double diffusion, double gamma,
                                  int mu_sign) {
    QuantumParams qp;
    qp.alpha = alpha;
    qp.hbar = hbar_of(alpha, diffusion, gamma);
    qp.mass = 1.0 / (2.0 * gamma);
    qp.mu = (mu_sign >= 0 ? 1.0 : -1.0) * 2.0 * M_PI * qp.hbar;
    return qp;
}

std::optional<std::pair<double, double>> alpha_roots(double diffusion,
                                                     double gamma, double mu) {
    if (mu == 0.0) throw DomainError("alpha_roots: mu must be nonzero");
    if (gamma == 0.0) throw DomainError("alpha_roots: gamma must be nonzero");
    const double m = mu / (2.0 * M_PI);
    const double b = 2.0 * diffusion / gamma;
    const double disc = b * b - m * m;
    if (disc < 0.0) return std::nullopt;
    const double s = std::sqrt(disc);
    return std::make_pair((b - s) / (m * m), (b + s) / (m * m));
}

LearningParams tune_parameters(const LearningParams& lp, double target_hbar,
                               TuneKnob knob) {
    if (!(target_hbar > 0.0))
        throw DomainError("tune_parameters: target hbar must be positive");
    if (!(lp.diffusion > 0.0))
        throw DomainError("tune_parameters: diffusion must be positive");
    const double mu = 2.0 * M_PI * target_hbar;
    const double target = 4.0 * M_PI;

    // |gamma mu / D| as a function of the knob value.
    auto ratio = [&](double knob_value) {
        const double g = knob == TuneKnob::gamma ? knob_value : lp.gamma;
        const double d = knob == TuneKnob::diffusion ? knob_value : lp.diffusion;
        return std::abs(g * mu / d);
    };

    const double sign = (knob == TuneKnob::gamma && lp.gamma < 0.0) ? -1.0 : 1.0;
    double x0 = knob == TuneKnob::gamma ? std::abs(lp.gamma) : lp.diffusion;
    if (!(x0 > 0.0)) x0 = 1.0;
    if (std::abs(ratio(sign * x0) - target) <= 1e-9 * target) return lp;

    // The ratio is monotone increasing in |gamma| and decreasing in D, so an
    // expanding bracket around the current value always captures the root.
    auto deficit = [&](double v) { return ratio(sign * v) - target; };
    double lo = x0, hi = x0;
    for (int k = 0; k < 400 && (deficit(lo) > 0.0) == (deficit(hi) > 0.0); ++k) {
        lo *= 0.5;
        hi *= 2.0;
    }
    if ((deficit(lo) > 0.0) == (deficit(hi) > 0.0))
        throw NumericError("tune_parameters: failed to bracket the target");
    const bool lo_positive = deficit(lo) > 0.0;
    for (int k = 0; k < 200 && (hi - lo) > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        if ((deficit(mid) > 0.0) == lo_positive)
            lo = mid;
        else
            hi = mid;
    }
    const double solved = 0.5 * (lo + hi);

    LearningParams out = lp;
    if (knob == TuneKnob::gamma)
        out.gamma = sign * solved;
    else
        out.diffusion = solved;
    return out;
}

}  // namespace emlab
