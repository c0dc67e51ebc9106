#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spintemp/spin_ops.hpp"

// Dimensionless spin Hamiltonians h = alpha * sum_k I_kz + h_dd for dipolar
// coupled spin-1/2 rings, chains, and arbitrary coordinate sets. Energies are
// measured in units of the nearest-neighbour coupling D, fields through the
// Zeeman ratio alpha.

namespace spintemp {

enum class Geometry { Ring, Chain, Custom };

// Which truncated pair form couples the spins; see build_secular /
// build_transverse for the operator content of each.
enum class HamiltonianForm { Secular, Transverse };

// Normalized coupling between sites m and n (1-based), nearest neighbour = 1:
//   ring : [sin(pi/N) / sin(pi d/N)]^3 with d the periodic site distance
//   chain: 1 / |m-n|^3
double coupling_constant(Geometry geometry, int n_spins, int m, int n);

// A spin register plus its symmetric dimensionless coupling table b_mn.
struct SpinSystem {
  int n_spins;
  Geometry geometry;
  Eigen::MatrixXd couplings;  // symmetric, zero diagonal, entries >= 0

  SpinSystem(int n_spins, Geometry geometry, Eigen::MatrixXd couplings);

  static SpinSystem ring(int n_spins);   // n_spins >= 2
  static SpinSystem chain(int n_spins);  // n_spins >= 1
  // b = 1/rho^3 from explicit coordinates; coordinates must already be in
  // units of the nearest-neighbour distance (distances are used verbatim).
  static SpinSystem custom(const std::vector<Eigen::Vector3d>& coords);
  // All couplings zero: the free-spin reference system.
  static SpinSystem noninteracting(int n_spins);
};

// Truncated dipolar form for inter-spin vectors PARALLEL to the field:
//   h = alpha sum_k I_kz + sum_{j<k} b_jk (2 I_jz I_kz - I_jx I_kx - I_jy I_ky)
// Commutes with total I_z; conserves polarization.
ManyBodyOperator build_secular(const SpinSystem& system, double alpha);

// Same coupling table with the inter-spin vectors PERPENDICULAR to the field
// (common transverse axis taken as x):
//   h = alpha sum_k I_kz - sum_{j<k} b_jk (2 I_jx I_kx - I_jy I_ky - I_jz I_kz)
// This is the default engine form for sweeps and thresholds; for a straight
// chain along x it coincides exactly with build_full_dipolar.
ManyBodyOperator build_transverse(const SpinSystem& system, double alpha);

ManyBodyOperator build_hamiltonian(const SpinSystem& system, double alpha,
                                   HamiltonianForm form);

// Full (untruncated) dipolar Hamiltonian from explicit coordinates:
//   h = alpha sum_k I_kz
//       - sum_{j<k} (1/rho_jk^3) [3 (I_j.u_jk)(I_k.u_jk) - I_j.I_k]
// with u_jk the unit vector from spin j to spin k and rho_jk = |r_j - r_k|
// taken verbatim (coordinates in nearest-neighbour units). The spin z axis is
// aligned with field_axis.
ManyBodyOperator build_full_dipolar(const std::vector<Eigen::Vector3d>& coords,
                                    const Eigen::Vector3d& field_axis,
                                    double alpha);

}  // namespace spintemp
