#pragma once

#include <Eigen/Dense>
#include <vector>

namespace emlab {

// A scalar non-trainable record that cycles through its spatial phases:
// x^1(t), x^2(t+1), ..., x^d(t+d-1), x^1(t+d), ...
struct NeuronTrajectory {
    std::vector<double> samples;
    int period = 3;

    void validate() const;
};

// Per-neuron frame: spatial entropy-destruction matrix, clock series and
// position.
struct LocalFrame {
    Eigen::Matrix3d g_spatial = Eigen::Matrix3d::Identity();
    std::vector<double> x0_series;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();

    void validate(double eps_min = 1e-6) const;
};

using FourVector = Eigen::Vector4d;

// Lorentz matrix with an affine shift.  The shift moves positions only;
// displacement four-vectors transform through the matrix alone, which is what
// keeps the entropy production invariant for every map.
class LorentzMap {
  public:
    LorentzMap();  // identity
    LorentzMap(const Eigen::Matrix4d& matrix, const Eigen::Vector4d& shift);

    const Eigen::Matrix4d& matrix() const { return matrix_; }
    const Eigen::Vector4d& shift() const { return shift_; }
    Eigen::Matrix4d inverse_matrix() const;  // eta * Lambda^T * eta

    static LorentzMap boost(const Eigen::Vector3d& velocity);
    static LorentzMap rotation(const Eigen::Vector3d& axis, double angle);

  private:
    Eigen::Matrix4d matrix_;
    Eigen::Vector4d shift_;
};

Eigen::Matrix4d minkowski_eta();

// Spatial displacement d-vectors extracted from a cycling trajectory, one per
// admissible window start: component a is (x(t+a-1+d) - x(t+a-1)) / d.
std::vector<Eigen::VectorXd> displacements(const NeuronTrajectory& tr);

// Cumulative trapezoid of sqrt(sigma_plus); the emergent clock.
std::vector<double> x0_clock(const std::vector<double>& sigma_plus,
                             double dt = 1.0);

// Windowed mean square of detrended sample increments; a simple non-negative
// estimate of the stochastic entropy production rate.
std::vector<double> sigma_plus_estimate(const std::vector<double>& samples,
                                        int window = 6);

// Entropy production -g_{mu nu} v^mu v^nu of a displacement four-vector.
double entropy_production_neuron(const FourVector& v, const Eigen::Matrix4d& g);

// Least-squares fit of the spatial matrix from displacement/destruction
// samples, projected to SPD by eigenvalue clipping.
Eigen::Matrix3d fit_local_metric(const std::vector<Eigen::VectorXd>& displ,
                                 const std::vector<double>& destruction,
                                 double eps_min = 1e-6);

// Transforms a displacement four-vector and its metric; entropy production is
// preserved.  Positions go through lorentz_apply_position instead.
std::pair<FourVector, Eigen::Matrix4d> lorentz_apply(const LorentzMap& map,
                                                     const FourVector& v,
                                                     const Eigen::Matrix4d& g);

FourVector lorentz_apply_position(const LorentzMap& map, const FourVector& x);

enum class Causal { null_like, timelike, spacelike };

Causal classify(const FourVector& v, const Eigen::Matrix4d& g,
                double band = 1e-12);

const char* causal_name(Causal c);

}  // namespace emlab
