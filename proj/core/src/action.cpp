#include "emlab/action.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emlab/errors.hpp"

namespace emlab {
namespace {

// Central difference in time on a possibly nonuniform mesh; one-sided at the
// series ends.  The same operator is applied to every time-dependent field so
// the two action forms stay algebraically linked.
double time_derivative(const std::vector<double>& times,
                       const std::vector<double>& samples, std::size_t s) {
    const std::size_t n = times.size();
    if (n == 1) return 0.0;
    if (s == 0) return (samples[1] - samples[0]) / (times[1] - times[0]);
    if (s == n - 1)
        return (samples[n - 1] - samples[n - 2]) / (times[n - 1] - times[n - 2]);
    return (samples[s + 1] - samples[s - 1]) / (times[s + 1] - times[s - 1]);
}

}  // namespace

ActionResult action_functional(const std::vector<DensityField>& p_series,
                               const std::vector<std::vector<double>>& ftilde_series,
                               const PotentialSpec& pot, double alpha,
                               double diffusion, double gamma, double p_floor) {
    if (p_series.empty())
        throw ConfigError("action_functional: empty density series");
    if (ftilde_series.size() != p_series.size())
        throw ConfigError("action_functional: density series has " +
                          std::to_string(p_series.size()) + " slices, Ftilde has " +
                          std::to_string(ftilde_series.size()));
    if (!(alpha > 0.0))
        throw ConfigError("action_functional: alpha must be positive");
    const GridSpec& grid = p_series.front().grid;
    const std::size_t n = grid.size();
    const std::size_t n_slices = p_series.size();
    std::vector<double> times(n_slices);
    for (std::size_t s = 0; s < n_slices; ++s) {
        if (!(p_series[s].grid == grid))
            throw ConfigError("action_functional: slice " + std::to_string(s) +
                              " is on a different grid");
        if (ftilde_series[s].size() != n)
            throw ConfigError("action_functional: Ftilde slice " +
                              std::to_string(s) + " has wrong node count");
        times[s] = p_series[s].time;
        if (s > 0 && !(times[s] > times[s - 1]))
            throw ConfigError("action_functional: slice times must increase");
    }

    const std::vector<double> V = pot.sample(grid);

    ActionResult result;
    std::vector<DensityField> p_norm(p_series);
    for (auto& slice : p_norm) normalize(slice);

    std::vector<double> logp(n);
    std::vector<double> slice_expanded(n_slices), slice_square(n_slices);
    std::vector<double> time_samples(n_slices);
    for (std::size_t s = 0; s < n_slices; ++s) {
        const std::vector<double>& p = p_norm[s].values;
        const std::vector<double>& ft = ftilde_series[s];
        for (std::size_t k = 0; k < n; ++k) {
            double pk = p[k];
            if (pk < p_floor) {
                ++result.floored_nodes;
                pk = p_floor;
            }
            logp[k] = std::log(pk);
        }

        std::vector<double> grad_logp[2], grad_ft[2];
        for (int ax = 0; ax < grid.dim; ++ax) {
            grad_logp[ax] = gradient_axis(grid, logp, ax);
            grad_ft[ax] = gradient_axis(grid, ft, ax);
        }

        std::vector<double> expanded(n), square(n);
        for (std::size_t k = 0; k < n; ++k) {
            double a2 = 0.0, b2 = 0.0, ab = 0.0;
            for (int ax = 0; ax < grid.dim; ++ax) {
                const double a = grad_logp[ax][k];
                const double b = grad_ft[ax][k];
                a2 += a * a;
                b2 += b * b;
                ab += a * b;
            }
            // dF = dFtilde - d(log p)/(2 alpha), applied per axis; the sums
            // expand to the combinations below.
            const double f2 = b2 - ab / alpha + a2 / (4.0 * alpha * alpha);
            const double af = ab - a2 / (2.0 * alpha);
            expanded[k] = diffusion * a2 + gamma * af + alpha * gamma * f2 +
                          alpha * V[k];
            square[k] = (diffusion - gamma / (4.0 * alpha)) * a2 +
                        alpha * gamma * b2 + alpha * V[k];
        }

        // Time-derivative terms.  d(log p)/dt enters the expanded form through
        // dF/dt = dFtilde/dt - (dp/dt)/(2 alpha p); multiplying by p turns the
        // second piece into dp/dt / (2 alpha), whose integral vanishes for a
        // mass-conserving series.
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t s2 = 0; s2 < n_slices; ++s2)
                time_samples[s2] = ftilde_series[s2][k];
            const double dft = time_derivative(times, time_samples, s);
            for (std::size_t s2 = 0; s2 < n_slices; ++s2)
                time_samples[s2] = p_norm[s2].values[k];
            const double dp = time_derivative(times, time_samples, s);
            expanded[k] = p[k] * expanded[k] -
                          alpha * (p[k] * dft - dp / (2.0 * alpha));
            square[k] = p[k] * square[k] - alpha * p[k] * dft;
        }
        slice_expanded[s] = grid.integrate(expanded);
        slice_square[s] = grid.integrate(square);
    }

    if (n_slices == 1) {
        result.expanded = slice_expanded[0];
        result.completed_square = slice_square[0];
        return result;
    }
    for (std::size_t s = 0; s + 1 < n_slices; ++s) {
        const double dt = times[s + 1] - times[s];
        result.expanded += 0.5 * dt * (slice_expanded[s] + slice_expanded[s + 1]);
        result.completed_square +=
            0.5 * dt * (slice_square[s] + slice_square[s + 1]);
    }
    return result;
}

}  // namespace emlab
