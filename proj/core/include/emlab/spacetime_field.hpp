#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "emlab/neuron_frame.hpp"

namespace emlab {

struct NeuronEnsemble {
    std::vector<LocalFrame> neurons;

    std::size_t count() const { return neurons.size(); }
    void validate(double eps_min = 1e-6) const;
};

// Spatial box at one global time slice, endpoints included.
struct SpatialGrid {
    double min[3] = {-6.0, -6.0, -6.0};
    double max[3] = {6.0, 6.0, 6.0};
    int res[3] = {64, 64, 64};
    double time = 0.0;

    void validate() const;
    double spacing(int axis) const;
    double coord(int axis, int i) const;
    std::size_t size() const;
    std::size_t index(int i, int j, int k) const;
    // Trapezoid weight product for a node.
    double quad_weight(int i, int j, int k) const;
};

// Weighted-average metric data on a spatial grid.  sqrt_minus_g stores the
// neuron number density (the weight sum with per-neuron determinant payload);
// coverage stores the bare weight sum.  Nodes where the density underflows are
// flagged empty and skipped by consumers.
struct MetricField {
    SpatialGrid grid;
    std::vector<Eigen::Matrix4d> g;
    std::vector<Eigen::Matrix4d> g_inv;
    std::vector<double> sqrt_minus_g;
    std::vector<double> coverage;
    std::vector<std::uint8_t> empty;

    std::size_t n_empty() const;
};

// Gaussian-window weighted sum of per-neuron payloads at a point:
//   sum_i payload_i (2 pi)^(-3/2) exp(-(x-x_i)^T g_i (x-x_i) / 2).
Eigen::VectorXd curly_bracket(const NeuronEnsemble& ens,
                              const std::vector<Eigen::VectorXd>& payloads,
                              const Eigen::Vector3d& x);
double curly_bracket_scalar(const NeuronEnsemble& ens,
                            const std::vector<double>& payloads,
                            const Eigen::Vector3d& x);

// Verifies every neuron sits at least `n_sigma` standard deviations of its
// own window inside the box.
void check_margin(const NeuronEnsemble& ens, const SpatialGrid& grid,
                  double n_sigma = 5.0);

MetricField metric_field(const NeuronEnsemble& ens, const SpatialGrid& grid,
                         double empty_threshold = 1e-60);

// Quadrature of the neuron number density over the box; approximates the
// ensemble size.
double neuron_count(const NeuronEnsemble& ens, const SpatialGrid& grid);

// max over non-empty nodes of |g g_inv - I|_inf; second order in the
// flat-metric perturbation size.
double inverse_consistency(const MetricField& mf);

// max over non-empty nodes of the relative gap between sqrt(-det g(x)) and
// the coverage-normalized density; second order in the perturbation size.
double determinant_consistency(const MetricField& mf,
                               const NeuronEnsemble& ens);

// Ensemble of n neurons with g_i = I + epsilon h_i, h_i symmetric with
// entries in [-1, 1] drawn from `seed`.  The draws depend on (seed, i) only,
// so sweeps over epsilon scale one fixed family of shapes.
NeuronEnsemble perturbed_ensemble(int n, double epsilon, std::uint64_t seed,
                                  double box_half = 3.0);

NeuronEnsemble load_ensemble_json(const std::string& path);
void save_ensemble_json(const NeuronEnsemble& ens, const std::string& path);

}  // namespace emlab
