#include "emlab/spacetime_field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "emlab/errors.hpp"
#include "emlab/rng.hpp"
#include "json.hpp"

namespace emlab {
namespace {

constexpr double kWindowNorm = 0.06349363593424097;  // (2 pi)^(-3/2)

double window_weight(const LocalFrame& frame, const Eigen::Vector3d& x) {
    const Eigen::Vector3d d = x - frame.position;
    return kWindowNorm * std::exp(-0.5 * d.dot(frame.g_spatial * d));
}

Eigen::Matrix4d synchronous(const Eigen::Matrix3d& spatial) {
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    g(0, 0) = -1.0;
    g.block<3, 3>(1, 1) = spatial;
    return g;
}

}  // namespace

void NeuronEnsemble::validate(double eps_min) const {
    if (neurons.empty()) throw ConfigError("ensemble has no neurons");
    for (std::size_t i = 0; i < neurons.size(); ++i) {
        try {
            neurons[i].validate(eps_min);
        } catch (const ConfigError& e) {
            throw ConfigError("neuron " + std::to_string(i) + ": " + e.what());
        }
    }
}

void SpatialGrid::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (res[a] < 2)
            throw ConfigError("grid axis " + std::to_string(a) +
                              " needs at least 2 nodes");
        if (!(max[a] > min[a]))
            throw ConfigError("grid axis " + std::to_string(a) +
                              " has non-positive extent");
    }
}

double SpatialGrid::spacing(int axis) const {
    return (max[axis] - min[axis]) / (res[axis] - 1);
}

double SpatialGrid::coord(int axis, int i) const {
    return min[axis] + spacing(axis) * i;
}

std::size_t SpatialGrid::size() const {
    return static_cast<std::size_t>(res[0]) * res[1] * res[2];
}

std::size_t SpatialGrid::index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * res[1] + j) * res[2] + k;
}

double SpatialGrid::quad_weight(int i, int j, int k) const {
    auto w = [](int c, int n) { return (c == 0 || c == n - 1) ? 0.5 : 1.0; };
    return w(i, res[0]) * w(j, res[1]) * w(k, res[2]);
}

std::size_t MetricField::n_empty() const {
    std::size_t n = 0;
    for (auto e : empty) n += e;
    return n;
}

Eigen::VectorXd curly_bracket(const NeuronEnsemble& ens,
                              const std::vector<Eigen::VectorXd>& payloads,
                              const Eigen::Vector3d& x) {
    if (payloads.size() != ens.count())
        throw ConfigError("curly_bracket: " + std::to_string(payloads.size()) +
                          " payloads for " + std::to_string(ens.count()) +
                          " neurons");
    if (payloads.empty()) return Eigen::VectorXd();
    const Eigen::Index dim = payloads.front().size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < ens.count(); ++i) {
        if (payloads[i].size() != dim)
            throw ConfigError("curly_bracket: payload " + std::to_string(i) +
                              " has mismatched dimension");
        out += payloads[i] * window_weight(ens.neurons[i], x);
    }
    return out;
}

double curly_bracket_scalar(const NeuronEnsemble& ens,
                            const std::vector<double>& payloads,
                            const Eigen::Vector3d& x) {
    if (payloads.size() != ens.count())
        throw ConfigError("curly_bracket: " + std::to_string(payloads.size()) +
                          " payloads for " + std::to_string(ens.count()) +
                          " neurons");
    double out = 0.0;
    for (std::size_t i = 0; i < ens.count(); ++i)
        out += payloads[i] * window_weight(ens.neurons[i], x);
    return out;
}

void check_margin(const NeuronEnsemble& ens, const SpatialGrid& grid,
                  double n_sigma) {
    grid.validate();
    for (std::size_t i = 0; i < ens.count(); ++i) {
        const LocalFrame& fr = ens.neurons[i];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(fr.g_spatial);
        const double lam_min = es.eigenvalues().minCoeff();
        if (!(lam_min > 0.0))
            throw ConfigError("neuron " + std::to_string(i) +
                              " has a non-positive window matrix");
        const double sigma = 1.0 / std::sqrt(lam_min);
        for (int a = 0; a < 3; ++a) {
            const double lo = fr.position[a] - grid.min[a];
            const double hi = grid.max[a] - fr.position[a];
            if (lo < n_sigma * sigma || hi < n_sigma * sigma)
                throw ConfigError(
                    "neuron " + std::to_string(i) + " is within " +
                    std::to_string(std::min(lo, hi) / sigma) +
                    " standard deviations of the box wall on axis " +
                    std::to_string(a));
        }
    }
}

MetricField metric_field(const NeuronEnsemble& ens, const SpatialGrid& grid,
                         double empty_threshold) {
    ens.validate();
    check_margin(ens, grid);
    const std::size_t n_neurons = ens.count();
    std::vector<double> det_root(n_neurons);
    std::vector<Eigen::Matrix3d> spatial_inv(n_neurons);
    for (std::size_t i = 0; i < n_neurons; ++i) {
        const Eigen::Matrix3d& gs = ens.neurons[i].g_spatial;
        const double det = gs.determinant();
        if (!(det > 0.0))
            throw ConfigError("neuron " + std::to_string(i) +
                              " has non-positive window determinant");
        det_root[i] = std::sqrt(det);
        spatial_inv[i] = gs.inverse();
    }

    MetricField mf;
    mf.grid = grid;
    const std::size_t n_nodes = grid.size();
    mf.g.assign(n_nodes, Eigen::Matrix4d::Zero());
    mf.g_inv.assign(n_nodes, Eigen::Matrix4d::Zero());
    mf.sqrt_minus_g.assign(n_nodes, 0.0);
    mf.coverage.assign(n_nodes, 0.0);
    mf.empty.assign(n_nodes, 0);

    for (int i = 0; i < grid.res[0]; ++i) {
        for (int j = 0; j < grid.res[1]; ++j) {
            for (int k = 0; k < grid.res[2]; ++k) {
                const Eigen::Vector3d x(grid.coord(0, i), grid.coord(1, j),
                                        grid.coord(2, k));
                double denom = 0.0, cover = 0.0;
                Eigen::Matrix3d num_g = Eigen::Matrix3d::Zero();
                Eigen::Matrix3d num_inv = Eigen::Matrix3d::Zero();
                for (std::size_t nn = 0; nn < n_neurons; ++nn) {
                    const double w = window_weight(ens.neurons[nn], x);
                    cover += w;
                    const double wd = w * det_root[nn];
                    denom += wd;
                    num_g += wd * ens.neurons[nn].g_spatial;
                    num_inv += wd * spatial_inv[nn];
                }
                const std::size_t node = grid.index(i, j, k);
                mf.sqrt_minus_g[node] = denom;
                mf.coverage[node] = cover;
                if (denom < empty_threshold) {
                    mf.empty[node] = 1;
                    mf.g[node] = synchronous(Eigen::Matrix3d::Identity());
                    mf.g_inv[node] = synchronous(Eigen::Matrix3d::Identity());
                    continue;
                }
                mf.g[node] = synchronous(num_g / denom);
                mf.g_inv[node] = synchronous(num_inv / denom);
            }
        }
    }
    return mf;
}

double neuron_count(const NeuronEnsemble& ens, const SpatialGrid& grid) {
    if (ens.count() == 0) return 0.0;
    check_margin(ens, grid);
    std::vector<double> det_root(ens.count());
    for (std::size_t i = 0; i < ens.count(); ++i)
        det_root[i] = std::sqrt(ens.neurons[i].g_spatial.determinant());
    double total = 0.0;
    for (int i = 0; i < grid.res[0]; ++i)
        for (int j = 0; j < grid.res[1]; ++j)
            for (int k = 0; k < grid.res[2]; ++k) {
                const Eigen::Vector3d x(grid.coord(0, i), grid.coord(1, j),
                                        grid.coord(2, k));
                double density = 0.0;
                for (std::size_t nn = 0; nn < ens.count(); ++nn)
                    density +=
                        det_root[nn] * window_weight(ens.neurons[nn], x);
                total += density * grid.quad_weight(i, j, k);
            }
    return total * grid.spacing(0) * grid.spacing(1) * grid.spacing(2);
}

double inverse_consistency(const MetricField& mf) {
    double worst = 0.0;
    for (std::size_t node = 0; node < mf.g.size(); ++node) {
        if (mf.empty[node]) continue;
        const Eigen::Matrix4d defect =
            mf.g[node] * mf.g_inv[node] - Eigen::Matrix4d::Identity();
        worst = std::max(worst, defect.cwiseAbs().maxCoeff());
    }
    return worst;
}

double determinant_consistency(const MetricField& mf,
                               const NeuronEnsemble& ens) {
    ens.validate();
    double worst = 0.0;
    for (std::size_t node = 0; node < mf.g.size(); ++node) {
        if (mf.empty[node] || !(mf.coverage[node] > 0.0)) continue;
        const double averaged = mf.sqrt_minus_g[node] / mf.coverage[node];
        const double direct = std::sqrt(-mf.g[node].determinant());
        worst = std::max(worst, std::abs(direct - averaged) / averaged);
    }
    return worst;
}

NeuronEnsemble perturbed_ensemble(int n, double epsilon, std::uint64_t seed,
                                  double box_half) {
    if (n < 1) throw ConfigError("perturbed_ensemble needs n >= 1");
    NeuronEnsemble ens;
    ens.neurons.resize(n);
    for (int i = 0; i < n; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        LocalFrame& fr = ens.neurons[i];
        for (int a = 0; a < 3; ++a)
            fr.position[a] = box_half * (2.0 * rng.uniform() - 1.0);
        Eigen::Matrix3d h;
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                h(a, b) = 2.0 * rng.uniform() - 1.0;
                h(b, a) = h(a, b);
            }
        fr.g_spatial = Eigen::Matrix3d::Identity() + epsilon * h;
    }
    ens.validate();
    return ens;
}

NeuronEnsemble load_ensemble_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open ensemble file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("ensemble file " + path + ": " + e.what());
    }
    if (!doc.is_array())
        throw ConfigError("ensemble file " + path + ": expected a JSON array");
    NeuronEnsemble ens;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        LocalFrame fr;
        try {
            const auto& pos = item.at("position");
            for (int a = 0; a < 3; ++a) fr.position[a] = pos.at(a).get<double>();
            const auto& mat = item.at("g_spatial");
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    fr.g_spatial(a, b) = mat.at(a).at(b).get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("ensemble entry " + std::to_string(i) + ": " +
                              e.what());
        }
        ens.neurons.push_back(fr);
    }
    ens.validate();
    return ens;
}

void save_ensemble_json(const NeuronEnsemble& ens, const std::string& path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const LocalFrame& fr : ens.neurons) {
        nlohmann::json item;
        item["position"] = {fr.position[0], fr.position[1], fr.position[2]};
        nlohmann::json rows = nlohmann::json::array();
        for (int a = 0; a < 3; ++a)
            rows.push_back({fr.g_spatial(a, 0), fr.g_spatial(a, 1),
                            fr.g_spatial(a, 2)});
        item["g_spatial"] = rows;
        doc.push_back(item);
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write ensemble file " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace emlab
