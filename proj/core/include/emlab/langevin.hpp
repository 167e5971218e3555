#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "emlab/fields.hpp"
#include "emlab/quantum_algebra.hpp"

namespace emlab {

// Gradient evaluator for the learning drift; must return one row per replica.
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Replica positions, one row per replica, one column per trainable variable.
struct ReplicaEnsemble {
    Eigen::MatrixXd positions;
    double time = 0.0;
    long step = 0;

    int n_replicas() const { return static_cast<int>(positions.rows()); }
    int dim() const { return static_cast<int>(positions.cols()); }
};

ReplicaEnsemble make_ensemble(int n_replicas, int dim, double value = 0.0);

// One Euler-Maruyama update of every replica:
//   dq = -gamma dF/dq dt + sqrt(2 D dt) xi.
// Noise is drawn from a per-replica counter stream keyed by (seed, replica),
// with the step index as the counter, so results do not depend on the number
// of worker threads.
void langevin_step(ReplicaEnsemble& ens, const GradFn& grad_f,
                   const LearningParams& lp, int n_threads = 1);

// Run many steps; convenience wrapper over langevin_step.
void langevin_run(ReplicaEnsemble& ens, const GradFn& grad_f,
                  const LearningParams& lp, long n_steps, int n_threads = 1);

struct EmpiricalDensity {
    DensityField field;
    // Fraction of samples that fell outside the grid (they are dropped and
    // the remaining mass is renormalized).
    double mass_deficit = 0.0;
};

// Histogram (bandwidth == 0) or Gaussian-kernel estimate of the replica law
// on the grid; the result integrates to 1 under the grid quadrature.
EmpiricalDensity empirical_density(const ReplicaEnsemble& ens,
                                   const GridSpec& grid,
                                   double bandwidth = 0.0);

// Pointwise production rate dS/dt of the Shannon entropy functional:
//   integral p [ D (d log p)^2 + gamma (d log p . dF) ] dq.
double entropy_production_rate(const DensityField& p,
                               const std::vector<double>& F,
                               const LearningParams& lp, double p_min = 1e-30);

// Time integral (trapezoid over snapshots) of the production rate.  `Fs`
// holds one nodal field per snapshot, or a single field reused for all.
double entropy_production_trainable(const std::vector<DensityField>& ps,
                                    const std::vector<std::vector<double>>& Fs,
                                    const LearningParams& lp,
                                    double p_min = 1e-30);

}  // namespace emlab
