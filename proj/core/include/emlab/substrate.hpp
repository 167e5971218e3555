#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace emlab {

enum class Activation { identity, tanh_fn, relu };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

// Distribution the boundary neurons are drawn from: a Gaussian mixture over
// the boundary subvector, or an explicit sample table (rows of boundary
// values, cycled through deterministically by sample index).
struct BoundarySource {
    struct Component {
        double weight = 1.0;
        Eigen::VectorXd mean;
        Eigen::VectorXd sigma;
    };
    std::vector<Component> components;
    std::vector<Eigen::VectorXd> samples;  // used when components is empty

    bool empty() const { return components.empty() && samples.empty(); }
};

// State vector of all neurons at one time step.
struct NetworkState {
    Eigen::VectorXd x;
    long t = 0;
};

// The learning system: neuron count, boundary projector (as a 0/1 mask),
// weights, biases, activation, boundary distribution and inverse temperature.
struct Septuple {
    int n = 0;
    Eigen::VectorXi boundary_mask;  // 1 = boundary neuron, 0 = bulk
    Eigen::MatrixXd weights;        // n x n
    Eigen::VectorXd bias;           // n
    Activation activation = Activation::identity;
    BoundarySource boundary_source;
    double beta = 1.0;

    void validate() const;
    int boundary_count() const { return boundary_mask.sum(); }
};

Eigen::VectorXd apply_activation(Activation a, const Eigen::VectorXd& z);

// One synchronous update x' = f(w x + b).
NetworkState step_network(const Septuple& s, const NetworkState& st);

// Residual r = x - f(w x + b).
Eigen::VectorXd residual(const Septuple& s, const NetworkState& st);

// 1/2 r^T P r with P the boundary projector.
double boundary_loss(const Septuple& s, const NetworkState& st);

// 1/2 r^T r + 1/2 V(x); pass a null evaluator for V = 0.
double bulk_loss(const Septuple& s, const NetworkState& st,
                 const std::function<double(const Eigen::VectorXd&)>& V = {});

// Trainable vector layout: q = [bias; vec(weights) row-major].
Eigen::VectorXd pack_trainable(const Septuple& s);
Septuple apply_trainable(const Septuple& s, const Eigen::VectorXd& q);

enum class LossKind { boundary, bulk };

struct FreeEnergyOptions {
    LossKind loss = LossKind::boundary;
    // Bulk neurons are marginalized by iterating the update map this many
    // times (boundary values held at their drawn sample) before the loss is
    // evaluated.
    int burn_in = 0;
    std::function<double(const Eigen::VectorXd&)> V;  // bulk loss potential
};

struct FreeEnergyResult {
    double value = 0.0;
    double std_error = 0.0;
};

// F(q) = (1/beta) log E[exp(-beta H)] over boundary samples, evaluated with a
// log-sum-exp guard.  Identical (seed, n_samples) reuse identical samples, so
// finite-difference callers get common random numbers for free.
FreeEnergyResult free_energy(const Septuple& s, const Eigen::VectorXd& q,
                             int n_samples, std::uint64_t seed,
                             const FreeEnergyOptions& opts = {});

// Central-difference gradient of free_energy in q, one common-random-number
// pair of evaluations per component.
Eigen::VectorXd free_energy_gradient(const Septuple& s,
                                     const Eigen::VectorXd& q, double h,
                                     int n_samples, std::uint64_t seed,
                                     const FreeEnergyOptions& opts = {});

// Draw one boundary sample (by index) from the source.
Eigen::VectorXd draw_boundary(const BoundarySource& src, int n_boundary,
                              std::uint64_t seed, std::uint64_t sample_index);

}  // namespace emlab
