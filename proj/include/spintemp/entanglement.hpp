#pragma once

#include <utility>

#include <Eigen/Dense>

#include "spintemp/hamiltonian.hpp"
#include "spintemp/spin_ops.hpp"
#include "spintemp/thermo.hpp"

// Two-spin reduced density matrices and the Wootters concurrence, the
// entanglement monotone used for every pair-entanglement result here.

namespace spintemp {

// Reduced density matrix of one spin pair. Basis ordering: the lower site
// index is the more significant bit (|a b> with a the bit of min(site) and b
// the bit of max(site)); validated Hermitian, unit-trace, PSD on construction.
struct TwoSpinState {
  Eigen::Matrix4cd matrix;
  int site_a;  // smaller 1-based site index
  int site_b;  // larger 1-based site index

  TwoSpinState(Eigen::Matrix4cd matrix, int site_a, int site_b);
};

// Trace out every spin except the two kept sites. The input must be a valid
// density matrix (Hermitian, unit trace).
TwoSpinState partial_trace(const ManyBodyOperator& rho,
                           std::pair<int, int> keep);

// (sigma_y x sigma_y) rho* (sigma_y x sigma_y), the spin-flipped state; the
// conjugation is entrywise in the computational basis.
Eigen::Matrix4cd spin_flip(const TwoSpinState& rho12);

struct ConcurrenceValue {
  double q_value;      // lambda1 - lambda2 - lambda3 - lambda4, may be < 0
  double concurrence;  // max(q_value, 0), in [0, 1]
};

// Wootters concurrence: the lambdas are square roots of the eigenvalues of
// R = rho12 * spin_flip(rho12) in descending order. R is non-Hermitian but
// has a mathematically non-negative real spectrum; it is eigensolved at unit
// max entry (results scaled back), and relative imaginary parts beyond 1e-8
// or relative real parts below -1e-10 signal an invalid input and throw.
ConcurrenceValue concurrence(const TwoSpinState& rho12);

// Reduced thermal state computed directly from eigenvectors and populations:
//   rho12[a,b] = sum_i p_i sum_rest V[idx(a,rest), i] * conj(V[idx(b,rest), i])
// Algebraically identical to partial_trace(density_matrix(state)) but O(dim^2)
// per call instead of O(dim^3); this is the kernel behind sweeps/thresholds.
TwoSpinState reduced_thermal_state(const ThermalState& state,
                                   std::pair<int, int> keep);

// One record of a concurrence sweep.
struct ConcurrencePoint {
  double beta = 0.0;
  double alpha = 0.0;
  double q_value = 0.0;
  double concurrence = 0.0;
};

// Concurrence of the thermal state of the secular Hamiltonian, composed step
// by step: build_secular -> eigendecomposition -> thermal_state ->
// density_matrix -> partial_trace -> concurrence.
ConcurrencePoint thermal_concurrence(const SpinSystem& system, double alpha,
                                     double beta,
                                     std::pair<int, int> pair = {1, 2});

}  // namespace spintemp
