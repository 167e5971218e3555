#include "emlab/langevin.hpp"

#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "emlab/errors.hpp"
#include "emlab/rng.hpp"

namespace emlab {

ReplicaEnsemble make_ensemble(int n_replicas, int dim, double value) {
    if (n_replicas <= 0 || dim <= 0)
        throw ConfigError("make_ensemble: n_replicas and dim must be positive");
    ReplicaEnsemble ens;
    ens.positions = Eigen::MatrixXd::Constant(n_replicas, dim, value);
    return ens;
}

namespace {

void step_range(ReplicaEnsemble& ens, const GradFn& grad_f,
                const LearningParams& lp, int begin, int end) {
    const double noise_scale = std::sqrt(2.0 * lp.diffusion * lp.dt);
    const int dim = ens.dim();
    for (int r = begin; r < end; ++r) {
        const Eigen::VectorXd q = ens.positions.row(r);
        const Eigen::VectorXd g = grad_f(q);
        if (g.size() != dim)
            throw ConfigError("langevin_step: gradient dimension mismatch");
        if (!g.allFinite()) {
            std::ostringstream msg;
            msg << "langevin_step: non-finite gradient at replica " << r
                << ", step " << ens.step << ", q = [" << q.transpose() << "]";
            throw NumericError(msg.str());
        }
        // Address this step's noise block directly so replica streams are
        // reproducible regardless of how steps are partitioned.
        for (int k = 0; k < dim; ++k) {
            const auto words = philox4x32(
                splitmix64(lp.seed) ^ splitmix64(static_cast<std::uint64_t>(r) + 1),
                static_cast<std::uint64_t>(ens.step),
                static_cast<std::uint64_t>(k));
            const double u1 = (static_cast<double>(words[0]) + 0.5) * 0x1p-32;
            const double u2 = (static_cast<double>(words[1]) + 0.5) * 0x1p-32;
            const double xi =
                std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            ens.positions(r, k) = q[k] - lp.gamma * g[k] * lp.dt + noise_scale * xi;
        }
    }
}

}  // namespace

void langevin_step(ReplicaEnsemble& ens, const GradFn& grad_f,
                   const LearningParams& lp, int n_threads) {
    if (!(lp.dt > 0.0)) throw ConfigError("langevin_step: dt must be positive");
    if (lp.diffusion < 0.0)
        throw ConfigError("langevin_step: diffusion must be non-negative");
    const int n = ens.n_replicas();
    if (n_threads <= 1 || n < 2 * n_threads) {
        step_range(ens, grad_f, lp, 0, n);
    } else {
        std::vector<std::thread> workers;
        std::exception_ptr first_error;
        std::mutex error_mutex;
        const int chunk = (n + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const int b = t * chunk;
            const int e = std::min(n, b + chunk);
            if (b >= e) break;
            workers.emplace_back([&, b, e] {
                try {
                    step_range(ens, grad_f, lp, b, e);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    ens.step += 1;
    ens.time += lp.dt;
}

void langevin_run(ReplicaEnsemble& ens, const GradFn& grad_f,
                  const LearningParams& lp, long n_steps, int n_threads) {
    for (long s = 0; s < n_steps; ++s)
        langevin_step(ens, grad_f, lp, n_threads);
}

EmpiricalDensity empirical_density(const ReplicaEnsemble& ens,
                                   const GridSpec& grid, double bandwidth) {
    grid.validate();
    if (ens.dim() != grid.dim)
        throw ConfigError("empirical_density: ensemble/grid dimension mismatch");
    EmpiricalDensity out;
    out.field.grid = grid;
    out.field.time = ens.time;
    out.field.values.assign(grid.size(), 0.0);
    const int n = ens.n_replicas();
    long dropped = 0;

    if (bandwidth < 0.0)
        throw ConfigError("empirical_density: bandwidth must be >= 0");

    if (bandwidth == 0.0) {
        // Nearest-node histogram.
        for (int r = 0; r < n; ++r) {
            int idx[2] = {0, 0};
            bool inside = true;
            for (int a = 0; a < grid.dim; ++a) {
                const double h = grid.spacing(a);
                const double rel = (ens.positions(r, a) - grid.min[a]) / h;
                const long i = std::lround(rel);
                const long hi = grid.boundary == Boundary::periodic
                                    ? grid.res[a]
                                    : grid.res[a] - 1;
                if (i < 0 || i > hi) { inside = false; break; }
                idx[a] = static_cast<int>(i % grid.res[a]);
            }
            if (!inside) { ++dropped; continue; }
            out.field.values[grid.index(idx[0], idx[1])] += 1.0;
        }
    } else {
        const double inv2s2 = 1.0 / (2.0 * bandwidth * bandwidth);
        const double norm1d = 1.0 / std::sqrt(2.0 * M_PI * bandwidth * bandwidth);
        for (int r = 0; r < n; ++r) {
            bool inside = true;
            for (int a = 0; a < grid.dim; ++a)
                if (ens.positions(r, a) < grid.min[a] ||
                    ens.positions(r, a) > grid.max[a])
                    inside = false;
            if (!inside) { ++dropped; continue; }
            const int nj = grid.dim == 2 ? grid.res[1] : 1;
            for (int j = 0; j < nj; ++j)
                for (int i = 0; i < grid.res[0]; ++i) {
                    double d2 = std::pow(grid.coord(0, i) - ens.positions(r, 0), 2);
                    if (grid.dim == 2)
                        d2 += std::pow(grid.coord(1, j) - ens.positions(r, 1), 2);
                    double k = std::exp(-d2 * inv2s2) * norm1d;
                    if (grid.dim == 2) k *= norm1d;
                    out.field.values[grid.index(i, j)] += k;
                }
        }
    }

    out.mass_deficit = n > 0 ? static_cast<double>(dropped) / n : 0.0;
    if (dropped == n)
        throw NumericError("empirical_density: all samples fell outside grid");
    normalize(out.field);
    return out;
}

double entropy_production_rate(const DensityField& p,
                               const std::vector<double>& F,
                               const LearningParams& lp, double p_min) {
    if (F.size() != p.grid.size())
        throw ConfigError("entropy_production_rate: F size mismatch");
    std::vector<double> logp(p.values.size());
    for (std::size_t k = 0; k < logp.size(); ++k)
        logp[k] = std::log(std::max(p.values[k], p_min));
    std::vector<double> integrand(p.values.size(), 0.0);
    for (int axis = 0; axis < p.grid.dim; ++axis) {
        const auto dlogp = gradient_axis(p.grid, logp, axis);
        const auto dF = gradient_axis(p.grid, F, axis);
        for (std::size_t k = 0; k < integrand.size(); ++k)
            integrand[k] += p.values[k] *
                            (lp.diffusion * dlogp[k] * dlogp[k] +
                             lp.gamma * dlogp[k] * dF[k]);
    }
    return p.grid.integrate(integrand);
}

double entropy_production_trainable(const std::vector<DensityField>& ps,
                                    const std::vector<std::vector<double>>& Fs,
                                    const LearningParams& lp, double p_min) {
    if (ps.size() < 2)
        throw ConfigError("entropy_production_trainable: need >= 2 snapshots");
    if (Fs.size() != 1 && Fs.size() != ps.size())
        throw ConfigError(
            "entropy_production_trainable: F series must have 1 or len(p) entries");
    double total = 0.0;
    double prev_rate = 0.0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const auto& F = Fs.size() == 1 ? Fs[0] : Fs[k];
        const double rate = entropy_production_rate(ps[k], F, lp, p_min);
        if (k > 0) {
            const double dt = ps[k].time - ps[k - 1].time;
            if (!(dt > 0.0))
                throw ConfigError(
                    "entropy_production_trainable: snapshot times must increase");
            total += 0.5 * (rate + prev_rate) * dt;
        }
        prev_rate = rate;
    }
    return total;
}

}  // namespace emlab
