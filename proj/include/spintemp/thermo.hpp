#pragma once

#include <Eigen/Dense>

#include "spintemp/spin_ops.hpp"

// Canonical thermal states at any real inverse temperature beta, positive or
// negative, with log-sum-exp stabilization so no |beta| can overflow. Entropy
// and heat capacity are normalized by the Boltzmann constant, energy is in
// units of the coupling scale D.

namespace spintemp {

// Boltzmann populations over the eigenstates of a Spectrum. `spectrum` is a
// non-owning pointer: the Spectrum must outlive the state (all call sites
// keep the decomposition on the stack around their states).
struct ThermalState {
  double beta = 0.0;
  Eigen::VectorXd populations;  // >= 0, sums to 1, ordered like eigenvalues
  const Spectrum* spectrum = nullptr;
  double log_norm = 0.0;  // log of the partition sum, exact at any beta
};

// Populations below this are treated as exactly zero in entropy sums,
// implementing the 0 ln 0 = 0 convention without per-element branching cost.
inline constexpr double kPopulationFloor = 1e-300;

// p_i = exp(-beta e_i) / sum_j exp(-beta e_j), evaluated as
// exp(-(beta e_i - s)) with s = min_i(beta e_i) so every exponent is <= 0.
ThermalState thermal_state(const Spectrum& spectrum, double beta);

double energy(const ThermalState& state);         // sum p_i e_i
double entropy(const ThermalState& state);        // -sum p_i ln p_i
double heat_capacity(const ThermalState& state);  // beta^2 Var(e), exact

// rho = V diag(p) V^dagger, hermitized against roundoff; unit trace.
ManyBodyOperator density_matrix(const ThermalState& state);

// One record of a beta sweep.
struct ThermoPoint {
  double beta = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  double heat_capacity = 0.0;
};

// Convenience bundle for sweep engines; validates the entropy bound
// S <= N ln 2 as a cheap runtime invariant.
ThermoPoint thermo_point(const Spectrum& spectrum, double beta);

}  // namespace spintemp
