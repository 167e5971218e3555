#include "emlab/neuron_frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emlab/errors.hpp"

namespace emlab {

void NeuronTrajectory::validate() const {
    if (period < 1)
        throw ConfigError("trajectory period must be at least 1");
    if (samples.size() < static_cast<std::size_t>(2 * period))
        throw ConfigError("trajectory needs at least " +
                          std::to_string(2 * period) + " samples, got " +
                          std::to_string(samples.size()));
    for (double s : samples)
        if (!std::isfinite(s))
            throw ConfigError("trajectory contains a non-finite sample");
}

void LocalFrame::validate(double eps_min) const {
    Eigen::Matrix3d sym = 0.5 * (g_spatial + g_spatial.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(sym);
    if (es.eigenvalues().minCoeff() < eps_min)
        throw ConfigError("local frame matrix has eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()) +
                          " below the positivity floor");
    for (std::size_t k = 1; k < x0_series.size(); ++k)
        if (x0_series[k] < x0_series[k - 1])
            throw ConfigError("clock series decreases at index " +
                              std::to_string(k));
}

Eigen::Matrix4d minkowski_eta() {
    Eigen::Matrix4d eta = Eigen::Matrix4d::Identity();
    eta(0, 0) = -1.0;
    return eta;
}

LorentzMap::LorentzMap()
    : matrix_(Eigen::Matrix4d::Identity()), shift_(Eigen::Vector4d::Zero()) {}

LorentzMap::LorentzMap(const Eigen::Matrix4d& matrix,
                       const Eigen::Vector4d& shift)
    : matrix_(matrix), shift_(shift) {
    const Eigen::Matrix4d eta = minkowski_eta();
    const Eigen::Matrix4d defect =
        matrix.transpose() * eta * matrix - eta;
    if (defect.cwiseAbs().maxCoeff() > 1e-12)
        throw ConfigError(
            "matrix does not preserve the Minkowski form (defect " +
            std::to_string(defect.cwiseAbs().maxCoeff()) + ")");
}

Eigen::Matrix4d LorentzMap::inverse_matrix() const {
    const Eigen::Matrix4d eta = minkowski_eta();
    return eta * matrix_.transpose() * eta;
}

LorentzMap LorentzMap::boost(const Eigen::Vector3d& velocity) {
    const double b2 = velocity.squaredNorm();
    if (b2 >= 1.0)
        throw DomainError("boost speed " + std::to_string(std::sqrt(b2)) +
                          " is not below 1");
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    if (b2 == 0.0) return LorentzMap(m, Eigen::Vector4d::Zero());
    const double gamma = 1.0 / std::sqrt(1.0 - b2);
    m(0, 0) = gamma;
    for (int a = 0; a < 3; ++a) {
        m(0, a + 1) = -gamma * velocity[a];
        m(a + 1, 0) = -gamma * velocity[a];
        for (int b = 0; b < 3; ++b)
            m(a + 1, b + 1) = (a == b ? 1.0 : 0.0) +
                              (gamma - 1.0) * velocity[a] * velocity[b] / b2;
    }
    return LorentzMap(m, Eigen::Vector4d::Zero());
}

LorentzMap LorentzMap::rotation(const Eigen::Vector3d& axis, double angle) {
    if (axis.norm() == 0.0) throw DomainError("rotation axis is zero");
    Eigen::Matrix3d r =
        Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.block<3, 3>(1, 1) = r;
    return LorentzMap(m, Eigen::Vector4d::Zero());
}

std::vector<Eigen::VectorXd> displacements(const NeuronTrajectory& tr) {
    tr.validate();
    const int d = tr.period;
    const long len = static_cast<long>(tr.samples.size());
    std::vector<Eigen::VectorXd> out;
    for (long t = 0; t + 2 * d - 1 < len; ++t) {
        Eigen::VectorXd v(d);
        for (int a = 0; a < d; ++a)
            v[a] = (tr.samples[t + a + d] - tr.samples[t + a]) / d;
        out.push_back(v);
    }
    return out;
}

std::vector<double> x0_clock(const std::vector<double>& sigma_plus, double dt) {
    std::vector<double> out(sigma_plus.size(), 0.0);
    double prev_root = 0.0;
    for (std::size_t k = 0; k < sigma_plus.size(); ++k) {
        if (sigma_plus[k] < 0.0)
            throw DomainError("sigma_plus is negative (" +
                              std::to_string(sigma_plus[k]) + ") at index " +
                              std::to_string(k));
        const double root = std::sqrt(sigma_plus[k]);
        if (k > 0) out[k] = out[k - 1] + 0.5 * dt * (prev_root + root);
        prev_root = root;
    }
    return out;
}

std::vector<double> sigma_plus_estimate(const std::vector<double>& samples,
                                        int window) {
    if (window < 2) throw ConfigError("sigma_plus window must be at least 2");
    if (samples.size() < 2)
        throw ConfigError("sigma_plus estimate needs at least 2 samples");
    const long n = static_cast<long>(samples.size()) - 1;
    std::vector<double> inc(n);
    for (long k = 0; k < n; ++k) inc[k] = samples[k + 1] - samples[k];
    std::vector<double> out(samples.size(), 0.0);
    for (long k = 0; k < static_cast<long>(samples.size()); ++k) {
        long lo = std::max(0L, k - window / 2);
        long hi = std::min(n, lo + window);
        lo = std::max(0L, hi - window);
        if (hi <= lo) {
            out[k] = 0.0;
            continue;
        }
        double mean = 0.0;
        for (long j = lo; j < hi; ++j) mean += inc[j];
        mean /= static_cast<double>(hi - lo);
        double var = 0.0;
        for (long j = lo; j < hi; ++j)
            var += (inc[j] - mean) * (inc[j] - mean);
        out[k] = var / static_cast<double>(hi - lo);
    }
    return out;
}

double entropy_production_neuron(const FourVector& v,
                                 const Eigen::Matrix4d& g) {
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ConfigError("entropy production needs a symmetric metric");
    return -v.dot(g * v);
}

Eigen::Matrix3d fit_local_metric(const std::vector<Eigen::VectorXd>& displ,
                                 const std::vector<double>& destruction,
                                 double eps_min) {
    if (displ.size() != destruction.size())
        throw ConfigError("fit_local_metric: " + std::to_string(displ.size()) +
                          " displacements vs " +
                          std::to_string(destruction.size()) + " destructions");
    if (displ.size() < 6)
        throw ConfigError("fit_local_metric needs at least 6 samples, got " +
                          std::to_string(displ.size()));
    const long n = static_cast<long>(displ.size());
    Eigen::MatrixXd design(n, 6);
    Eigen::VectorXd target(n);
    for (long r = 0; r < n; ++r) {
        if (displ[r].size() != 3)
            throw ConfigError("fit_local_metric expects 3-component "
                              "displacements");
        const double v1 = displ[r][0], v2 = displ[r][1], v3 = displ[r][2];
        design(r, 0) = v1 * v1;
        design(r, 1) = v2 * v2;
        design(r, 2) = v3 * v3;
        design(r, 3) = 2.0 * v1 * v2;
        design(r, 4) = 2.0 * v1 * v3;
        design(r, 5) = 2.0 * v2 * v3;
        target[r] = -destruction[r];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? sv[0] * 1e-10 : 0.0;
    std::vector<int> null_dirs;
    for (int c = 0; c < sv.size(); ++c)
        if (!(sv[c] > cutoff) || sv[0] == 0.0) null_dirs.push_back(c);
    if (sv.size() < 6 || !null_dirs.empty()) {
        static const char* names[6] = {"g_11", "g_22", "g_33",
                                       "g_12", "g_13", "g_23"};
        std::vector<std::string> components;
        const Eigen::MatrixXd& V = svd.matrixV();
        for (int comp = 0; comp < 6; ++comp) {
            double mass = 0.0;
            for (int dir : null_dirs) mass += V(comp, dir) * V(comp, dir);
            if (mass > 1e-8 || sv[0] == 0.0)
                components.push_back(names[comp]);
        }
        if (components.empty()) components.push_back("(unresolved mixture)");
        throw RankDeficientError(
            "fit_local_metric: design rank " +
                std::to_string(sv.size() -
                               static_cast<long>(null_dirs.size())) +
                " of 6",
            components);
    }
    Eigen::VectorXd coef = svd.solve(target);
    Eigen::Matrix3d g;
    g << coef[0], coef[3], coef[4], coef[3], coef[1], coef[5], coef[4],
        coef[5], coef[2];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g);
    Eigen::Vector3d ev = es.eigenvalues();
    bool clipped = false;
    for (int k = 0; k < 3; ++k)
        if (ev[k] < eps_min) {
            ev[k] = eps_min;
            clipped = true;
        }
    if (!clipped) return 0.5 * (g + g.transpose());
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

std::pair<FourVector, Eigen::Matrix4d> lorentz_apply(
    const LorentzMap& map, const FourVector& v, const Eigen::Matrix4d& g) {
    const Eigen::Matrix4d inv = map.inverse_matrix();
    FourVector v_out = map.matrix() * v;
    Eigen::Matrix4d g_out = inv.transpose() * g * inv;
    return {v_out, g_out};
}

FourVector lorentz_apply_position(const LorentzMap& map, const FourVector& x) {
    return map.matrix() * x + map.shift();
}

Causal classify(const FourVector& v, const Eigen::Matrix4d& g, double band) {
    const double s = v.dot(g * v);
    if (std::abs(s) <= band) return Causal::null_like;
    return s < 0.0 ? Causal::timelike : Causal::spacelike;
}

const char* causal_name(Causal c) {
    switch (c) {
        case Causal::null_like: return "null";
        case Causal::timelike: return "timelike";
        default: return "spacelike";
    }
}

}  // namespace emlab
