#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "emlab/grid.hpp"

namespace emlab {

// Probability density sampled on grid nodes.  Solver entry points expect the
// quadrature of `values` to equal 1 within 1e-6; `normalize` enforces this.
struct DensityField {
    GridSpec grid;
    std::vector<double> values;
    double time = 0.0;
};

// Nodal velocity field u_k; component k is stored in comps[k].
struct VelocityField {
    GridSpec grid;
    std::array<std::vector<double>, 2> comps;
    double time = 0.0;
};

// Complex wavefunction on grid nodes together with its (hbar, mass) pair.
struct WaveField {
    GridSpec grid;
    std::vector<std::complex<double>> values;
    double hbar = 1.0;
    double mass = 1.0;
    double time = 0.0;
};

// Potential V(q) entering the drift-side dynamics.  The evaluator is the sum
// that solvers consume; `constant_part` and `timeavg_drive` record the split
// between the normalization constant and the time-averaged drive it absorbs.
struct PotentialSpec {
    std::function<double(double, double)> evaluate;  // (q1, q2); q2 ignored in 1D
    double constant_part = 0.0;
    double timeavg_drive = 0.0;

    std::vector<double> sample(const GridSpec& grid) const;
};

// Scale `values` so the grid quadrature equals 1.  Throws if the mass is not
// positive or not finite.
void normalize(DensityField& p);

double total_mass(const DensityField& p);

// L1 distance integral |a - b| dq on a shared grid.
double compare_densities(const DensityField& a, const DensityField& b);

// Shannon entropy -integral p log p with the positivity floor applied inside
// the logarithm only.
double shannon_entropy(const DensityField& p, double p_min = 1e-30);

// Nodal first derivative along an axis: central differences in the interior,
// wrap-around on periodic axes, second-order one-sided at reflecting ends.
std::vector<double> gradient_axis(const GridSpec& grid,
                                  const std::vector<double>& values, int axis);

// Variance of a (normalized) 1D density about its mean.
double density_variance(const DensityField& p);

void write_density_csv(const DensityField& p, const std::string& path);
void write_wavefield_csv(const WaveField& w, const std::string& path);

}  // namespace emlab
