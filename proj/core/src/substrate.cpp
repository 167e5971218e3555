#include "emlab/substrate.hpp"

#include <cmath>

#include "emlab/errors.hpp"
#include "emlab/rng.hpp"

namespace emlab {

Activation activation_from_string(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "tanh") return Activation::tanh_fn;
    if (name == "relu") return Activation::relu;
    throw ConfigError("activation: unknown name '" + name + "'");
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::tanh_fn: return "tanh";
        case Activation::relu: return "relu";
    }
    return "identity";
}

void Septuple::validate() const {
    if (n <= 0) throw ConfigError("septuple.n: must be positive");
    if (boundary_mask.size() != n)
        throw ConfigError("septuple.boundary_mask: size mismatch");
    for (int i = 0; i < n; ++i)
        if (boundary_mask[i] != 0 && boundary_mask[i] != 1)
            throw ConfigError("septuple.boundary_mask: entries must be 0 or 1");
    if (weights.rows() != n || weights.cols() != n)
        throw ConfigError("septuple.weights: must be n x n");
    if (bias.size() != n) throw ConfigError("septuple.bias: size mismatch");
    if (!(beta > 0.0)) throw ConfigError("septuple.beta: must be positive");
}

Eigen::VectorXd apply_activation(Activation a, const Eigen::VectorXd& z) {
    switch (a) {
        case Activation::identity: return z;
        case Activation::tanh_fn: return z.array().tanh();
        case Activation::relu: return z.cwiseMax(0.0);
    }
    return z;
}

NetworkState step_network(const Septuple& s, const NetworkState& st) {
    if (st.x.size() != s.n)
        throw ConfigError("step_network: state dimension mismatch");
    NetworkState out;
    out.x = apply_activation(s.activation, s.weights * st.x + s.bias);
    out.t = st.t + 1;
    return out;
}

Eigen::VectorXd residual(const Septuple& s, const NetworkState& st) {
    if (st.x.size() != s.n)
        throw ConfigError("residual: state dimension mismatch");
    return st.x - apply_activation(s.activation, s.weights * st.x + s.bias);
}

double boundary_loss(const Septuple& s, const NetworkState& st) {
    const Eigen::VectorXd r = residual(s, st);
    double acc = 0.0;
    for (int i = 0; i < s.n; ++i)
        if (s.boundary_mask[i]) acc += r[i] * r[i];
    return 0.5 * acc;
}

double bulk_loss(const Septuple& s, const NetworkState& st,
                 const std::function<double(const Eigen::VectorXd&)>& V) {
    const Eigen::VectorXd r = residual(s, st);
    double acc = r.squaredNorm();
    if (V) acc += V(st.x);
    return 0.5 * acc;
}

Eigen::VectorXd pack_trainable(const Septuple& s) {
    Eigen::VectorXd q(s.n + s.n * s.n);
    q.head(s.n) = s.bias;
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j) q[s.n + i * s.n + j] = s.weights(i, j);
    return q;
}

Septuple apply_trainable(const Septuple& s, const Eigen::VectorXd& q) {
    if (q.size() != s.n + s.n * s.n)
        throw ConfigError("apply_trainable: trainable vector size mismatch");
    Septuple out = s;
    out.bias = q.head(s.n);
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j) out.weights(i, j) = q[s.n + i * s.n + j];
    return out;
}

Eigen::VectorXd draw_boundary(const BoundarySource& src, int n_boundary,
                              std::uint64_t seed, std::uint64_t sample_index) {
    if (!src.samples.empty()) {
        const auto& row = src.samples[sample_index % src.samples.size()];
        if (row.size() != n_boundary)
            throw ConfigError("boundary_source.samples: row size mismatch");
        return row;
    }
    if (src.components.empty())
        throw ConfigError("boundary_source: empty distribution");
    RngStream rng(seed, sample_index);
    // Pick a mixture component by cumulative weight, then draw the Gaussian.
    double wsum = 0.0;
    for (const auto& c : src.components) wsum += c.weight;
    double u = rng.uniform() * wsum;
    const BoundarySource::Component* comp = &src.components.back();
    for (const auto& c : src.components) {
        if (u < c.weight) { comp = &c; break; }
        u -= c.weight;
    }
    if (comp->mean.size() != n_boundary || comp->sigma.size() != n_boundary)
        throw ConfigError("boundary_source.components: dimension mismatch");
    Eigen::VectorXd x(n_boundary);
    for (int i = 0; i < n_boundary; ++i)
        x[i] = comp->mean[i] + comp->sigma[i] * rng.normal();
    return x;
}

namespace {

// Insert boundary values into a full state (bulk entries start at zero), run
// the configured burn-in with the boundary clamped, and evaluate the loss.
double sample_hamiltonian(const Septuple& s, const Eigen::VectorXd& bvals,
                          const FreeEnergyOptions& opts) {
    NetworkState st;
    st.x = Eigen::VectorXd::Zero(s.n);
    int bi = 0;
    for (int i = 0; i < s.n; ++i)
        if (s.boundary_mask[i]) st.x[i] = bvals[bi++];
    for (int k = 0; k < opts.burn_in; ++k) {
        NetworkState next = step_network(s, st);
        bi = 0;
        for (int i = 0; i < s.n; ++i)
            if (s.boundary_mask[i]) next.x[i] = bvals[bi++];
        st = next;
    }
    return opts.loss == LossKind::boundary ? boundary_loss(s, st)
                                           : bulk_loss(s, st, opts.V);
}

}  // namespace

FreeEnergyResult free_energy(const Septuple& s, const Eigen::VectorXd& q,
                             int n_samples, std::uint64_t seed,
                             const FreeEnergyOptions& opts) {
    s.validate();
    if (n_samples <= 0) throw ConfigError("free_energy: n_samples must be > 0");
    const Septuple sq = apply_trainable(s, q);
    const int nb = s.boundary_count();

    std::vector<double> neg_beta_h(static_cast<std::size_t>(n_samples));
    double hmax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_samples; ++k) {
        const Eigen::VectorXd b = draw_boundary(s.boundary_source, nb, seed,
                                                static_cast<std::uint64_t>(k));
        const double h = sample_hamiltonian(sq, b, opts);
        if (!std::isfinite(h))
            throw NumericError("free_energy: non-finite loss sample");
        neg_beta_h[k] = -s.beta * h;
        hmax = std::max(hmax, neg_beta_h[k]);
    }
    // log-mean-exp with the max factored out.
    double acc = 0.0, acc2 = 0.0;
    for (double v : neg_beta_h) {
        const double e = std::exp(v - hmax);
        acc += e;
        acc2 += e * e;
    }
    const double mean = acc / n_samples;
    const double var = std::max(0.0, acc2 / n_samples - mean * mean);
    const double se_mean =
        std::sqrt(var / std::max(1, n_samples - 1));
    FreeEnergyResult r;
    r.value = (hmax + std::log(mean)) / s.beta;
    // Delta method through log: se(log m) = se(m)/m, then the 1/beta scale.
    r.std_error = se_mean / (mean * s.beta);
    return r;
}

Eigen::VectorXd free_energy_gradient(const Septuple& s,
                                     const Eigen::VectorXd& q, double h,
                                     int n_samples, std::uint64_t seed,
                                     const FreeEnergyOptions& opts) {
    if (!(h > 0.0)) throw ConfigError("free_energy_gradient: h must be > 0");
    Eigen::VectorXd g(q.size());
    Eigen::VectorXd qp = q, qm = q;
    for (int k = 0; k < q.size(); ++k) {
        qp[k] = q[k] + h;
        qm[k] = q[k] - h;
        const double fp = free_energy(s, qp, n_samples, seed, opts).value;
        const double fm = free_energy(s, qm, n_samples, seed, opts).value;
        g[k] = (fp - fm) / (2.0 * h);
        qp[k] = q[k];
        qm[k] = q[k];
    }
    return g;
}

}  // namespace emlab
