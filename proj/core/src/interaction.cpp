#include "emlab/interaction.hpp"

#include <array>
#include <cmath>
#include <string>

#include "emlab/christoffel.hpp"
#include "emlab/errors.hpp"
#include "emlab/rng.hpp"
#include "emlab/spacetime_metric.hpp"

namespace emlab {
namespace {

constexpr double kWindowNorm = 0.06349363593424097;  // (2 pi)^(-3/2)

// Trilinear interpolation of the stored inverse metric of a slice.
bool sample_inverse(const MetricField& mf, const Eigen::Vector3d& x,
                    Eigen::Matrix4d& out) {
    const SpatialGrid& grid = mf.grid;
    int base[3];
    double frac[3];
    for (int a = 0; a < 3; ++a) {
        const double u = (x[a] - grid.min[a]) / grid.spacing(a);
        if (u < 0.0 || u > grid.res[a] - 1) return false;
        base[a] = static_cast<int>(std::floor(u));
        if (base[a] >= grid.res[a] - 1) base[a] = grid.res[a] - 2;
        frac[a] = u - base[a];
    }
    out.setZero();
    for (int m = 0; m < 8; ++m) {
        int idx[3];
        double w = 1.0;
        for (int a = 0; a < 3; ++a) {
            const int bit = (m >> a) & 1;
            idx[a] = base[a] + bit;
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        if (w == 0.0) continue;
        const std::size_t node = grid.index(idx[0], idx[1], idx[2]);
        if (mf.empty[node]) return false;
        out += w * mf.g_inv[node];
    }
    return true;
}

}  // namespace

InteractionReport interaction_entropy(const NeuronEnsemble& ens,
                                      const MetricField& mf, long n_samples,
                                      std::uint64_t seed) {
    ens.validate();
    if (n_samples < 2)
        throw ConfigError("interaction entropy needs at least 2 velocity "
                          "samples per neuron");
    const std::size_t n_neurons = ens.count();
    const SpatialGrid& grid = mf.grid;

    const SpacetimeMetric sm = stack_slices({mf}, grid.time, 1.0);
    const ChristoffelField cf = christoffel(sm);

    InteractionReport report;
    report.n_samples = n_samples;

    // Per-neuron aggregates.
    std::vector<double> det_root(n_neurons);
    std::vector<Eigen::Vector3d> b_cov(n_neurons);  // g_{i,ab} <xdd^a>
    // U^b_{alpha beta} = sum_a g_{i,ab} <v^a u^alpha u^beta>
    std::vector<std::array<Eigen::Matrix4d, 3>> U(n_neurons);
    std::vector<Eigen::Matrix4d> M(n_neurons);  // <u u^T>

    std::array<double, 160> gamma;
    for (std::size_t i = 0; i < n_neurons; ++i) {
        const LocalFrame& fr = ens.neurons[i];
        det_root[i] = std::sqrt(fr.g_spatial.determinant());

        Eigen::Matrix4d ginv_at;
        if (!sample_inverse(mf, fr.position, ginv_at))
            throw NodeError("neuron " + std::to_string(i) +
                            " sits outside the usable field region");
        const Eigen::Matrix3d sigma =
            0.5 * (fr.g_spatial.inverse() +
                   ginv_at.block<3, 3>(1, 1));
        Eigen::LLT<Eigen::Matrix3d> llt(sigma);
        if (llt.info() != Eigen::Success)
            throw NumericError("velocity covariance of neuron " +
                               std::to_string(i) +
                               " is not positive definite");
        const Eigen::Matrix3d L = llt.matrixL();

        RngStream rng(seed, static_cast<std::uint64_t>(i));
        Eigen::Matrix4d m_acc = Eigen::Matrix4d::Zero();
        std::array<Eigen::Matrix4d, 3> t_acc;
        for (auto& t : t_acc) t.setZero();
        Eigen::Matrix3d cov_acc = Eigen::Matrix3d::Zero();
        for (long s = 0; s < n_samples; ++s) {
            Eigen::Vector3d xi(rng.normal(), rng.normal(), rng.normal());
            const Eigen::Vector3d v = L * xi;
            const Eigen::Vector4d u(1.0, v[0], v[1], v[2]);
            const Eigen::Matrix4d uu = u * u.transpose();
            m_acc += uu;
            for (int a = 0; a < 3; ++a) t_acc[a] += v[a] * uu;
            cov_acc += v * v.transpose();
        }
        const double inv_n = 1.0 / static_cast<double>(n_samples);
        M[i] = m_acc * inv_n;
        cov_acc *= inv_n;
        const double cov_scale = sigma.cwiseAbs().maxCoeff();
        report.moment_error =
            std::max(report.moment_error,
                     (cov_acc - sigma).cwiseAbs().maxCoeff() / cov_scale);

        // third-moment aggregate contracted with the window matrix
        for (int b = 0; b < 3; ++b) {
            U[i][b].setZero();
            for (int a = 0; a < 3; ++a)
                U[i][b] += fr.g_spatial(a, b) * t_acc[a] * inv_n;
        }

        double ev[4] = {grid.time, fr.position[0], fr.position[1],
                        fr.position[2]};
        if (!cf.sample(ev, gamma))
            throw NodeError("neuron " + std::to_string(i) +
                            " has no connection stencil support");
        // <xdd^a> = G^0_ab <v^a u u> - G^a_ab <u u>
        Eigen::Vector3d acc = Eigen::Vector3d::Zero();
        for (int a = 0; a < 3; ++a) {
            double s = 0.0;
            for (int al = 0; al < 4; ++al)
                for (int be = 0; be < 4; ++be) {
                    const double t_mean = t_acc[a](al, be) * inv_n;
                    s += gamma[(0 * 4 + al) * 4 + be] * t_mean;
                    s -= gamma[((a + 1) * 4 + al) * 4 + be] * M[i](al, be);
                }
            acc[a] = s;
        }
        b_cov[i] = fr.g_spatial * acc;
    }

    // Field assembly and the connection-weighted balance integrand.
    report.field.assign(grid.size(), 0.0);
    std::vector<double> balance(grid.size(), 0.0);
    for (int i = 0; i < grid.res[0]; ++i) {
        for (int j = 0; j < grid.res[1]; ++j) {
            for (int k = 0; k < grid.res[2]; ++k) {
                const std::size_t node = grid.index(i, j, k);
                const Eigen::Vector3d x(grid.coord(0, i), grid.coord(1, j),
                                        grid.coord(2, k));
                double f = 0.0;
                Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
                std::array<Eigen::Matrix4d, 3> B;
                for (auto& bm : B) bm.setZero();
                for (std::size_t nn = 0; nn < n_neurons; ++nn) {
                    const LocalFrame& fr = ens.neurons[nn];
                    const Eigen::Vector3d d = x - fr.position;
                    const double w =
                        det_root[nn] * kWindowNorm *
                        std::exp(-0.5 * d.dot(fr.g_spatial * d));
                    if (w == 0.0) continue;
                    f -= w * b_cov[nn].dot(x);
                    for (int b = 0; b < 3; ++b) A += w * d[b] * U[nn][b];
                    const Eigen::Vector3d gd = fr.g_spatial * d;
                    for (int a = 0; a < 3; ++a) B[a] += w * gd[a] * M[nn];
                }
                report.field[node] = f;
                const std::size_t node4 = sm.grid.index(0, i, j, k);
                if (cf.flagged[node4]) continue;
                double integrand = 0.0;
                for (int al = 0; al < 4; ++al)
                    for (int be = 0; be < 4; ++be) {
                        integrand -= cf.at(node4, 0, al, be) * A(al, be);
                        for (int a = 0; a < 3; ++a)
                            integrand +=
                                cf.at(node4, a + 1, al, be) * B[a](al, be);
                    }
                balance[node] = integrand;
            }
        }
    }

    // quadrature over the slice
    double total = 0.0, residual = 0.0;
    const double cell = grid.spacing(0) * grid.spacing(1) * grid.spacing(2);
    for (int i = 0; i < grid.res[0]; ++i)
        for (int j = 0; j < grid.res[1]; ++j)
            for (int k = 0; k < grid.res[2]; ++k) {
                const std::size_t node = grid.index(i, j, k);
                const double w = grid.quad_weight(i, j, k) * cell;
                total += report.field[node] * w;
                residual += balance[node] * w;
            }
    report.total = total;
    report.balance_residual = std::abs(residual);
    return report;
}

}  // namespace emlab
