#pragma once

#include "emlab/fields.hpp"

namespace emlab {

// Psi = sqrt(p) exp(-i Ftilde / hbar), nodewise.
WaveField to_wavefunction(const DensityField& p,
                          const std::vector<double>& f_tilde, double hbar,
                          double mass);

struct WaveDecomposition {
    DensityField p;          // |Psi|^2
    VelocityField u;         // (1/m) dFtilde/dq
    std::vector<double> f_tilde;  // -hbar * unwrapped phase
};

// Inverse map: p = |Psi|^2, Ftilde = -hbar * unwrap(arg Psi), u = dFtilde/m.
// The unwrapped phase is defined up to one global 2 pi multiple, so Ftilde
// carries a global 2 pi hbar ambiguity; derived quantities do not.  Throws
// NodeError when |Psi|^2 falls below `floor` anywhere.
WaveDecomposition from_wavefunction(const WaveField& w, double floor = 1e-250);

// 1D/2D phase unwrapping (row scan, then column propagation).
std::vector<double> unwrap_phase(const GridSpec& grid,
                                 const std::vector<double>& wrapped);

}  // namespace emlab
