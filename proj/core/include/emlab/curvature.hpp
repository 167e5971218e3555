#pragma once

#include <cstdint>
#include <vector>

#include "emlab/christoffel.hpp"
#include "emlab/spacetime_metric.hpp"

namespace emlab {

struct RicciField {
    Grid4 grid;
    std::vector<Eigen::Matrix4d> value;  // symmetrized
    std::vector<std::uint8_t> flagged;
    double max_asymmetry = 0.0;

    double max_abs() const;
};

struct ActionReport {
    // -1/2 Integral( sqrt(-g) g^{ab} G^m_ab G^c_cm
    //                 + G^m_ab d_m(sqrt(-g) g^{ab}) )
    double gamma_gamma_value = 0.0;
    // Integral( sqrt(-g) g^{ab} R_ab )
    double ricci_value = 0.0;
    double lambda = 0.0;
    double n_bar = 0.0;
    double volume = 0.0;  // Integral sqrt(-g)
    double total = 0.0;
};

RicciField ricci(const SpacetimeMetric& sm, const ChristoffelField& cf);
RicciField ricci(const SpacetimeMetric& sm);

// Both discrete forms of the gravitational action; they agree on periodic
// domains up to stencil error of second order.
ActionReport eh_action(const SpacetimeMetric& sm);

// total = ricci_value - 2 lambda * volume + 2 lambda * n_bar.
ActionReport lambda_functional(const SpacetimeMetric& sm, double lambda,
                               double n_bar);

struct EinsteinField {
    Grid4 grid;
    std::vector<Eigen::Matrix4d> value;
    std::vector<std::uint8_t> flagged;

    double max_abs() const;
};

// R_mn - (1/2) g^{ab} R_ab g_mn + lambda g_mn, node-wise.
EinsteinField einstein_residual(const SpacetimeMetric& sm, double lambda);

struct VariationalCheck {
    double max_relative_error = 0.0;  // vs max |sqrt(-g) E| over probes
    double scale = 0.0;               // max |sqrt(-g) E| seen
    long n_probes = 0;
};

// Central-difference derivative of the lambda functional with respect to
// node values of the inverse metric, compared against the assembled density
// sqrt(-g) (R_mn - 1/2 R g_mn + lambda g_mn).  Probes are drawn from
// unflagged nodes.
VariationalCheck einstein_variational_check(const SpacetimeMetric& sm,
                                            double lambda, int n_probe_nodes,
                                            std::uint64_t seed,
                                            double delta = 1e-5);

}  // namespace emlab
