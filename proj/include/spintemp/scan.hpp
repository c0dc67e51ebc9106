#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "spintemp/entanglement.hpp"
#include "spintemp/hamiltonian.hpp"
#include "spintemp/spin_ops.hpp"
#include "spintemp/thermo.hpp"

// Parameter sweeps over beta, the entanglement-boundary root finder, S(E)
// parametric curves, and the physical-unit conversions. Sweeps come in an
// OpenMP-parallel flavor and a serial reference flavor that share the same
// per-point kernel, so their outputs are bit-identical.

namespace spintemp {

// Uniform beta grid including both endpoints.
struct SweepGrid {
  double beta_min;
  double beta_max;
  int n_points;

  SweepGrid(double beta_min, double beta_max, int n_points);
  double at(int i) const {
    return i == n_points - 1
               ? beta_max
               : beta_min + (beta_max - beta_min) * i / (n_points - 1);
  }
  std::vector<double> values() const;

  // Figure-reproduction default: the interesting structure of every preset
  // lies within |beta| <= 4, and 801 points hit beta = 0 exactly.
  static SweepGrid default_grid() { return SweepGrid(-4.0, 4.0, 801); }
};

// --- thermodynamic sweeps ---------------------------------------------------

std::vector<ThermoPoint> sweep_thermo(const Spectrum& spectrum,
                                      const SweepGrid& grid);
std::vector<ThermoPoint> sweep_thermo_serial(const Spectrum& spectrum,
                                             const SweepGrid& grid);
std::vector<ThermoPoint> sweep_thermo(
    const SpinSystem& system, double alpha, const SweepGrid& grid,
    HamiltonianForm form = HamiltonianForm::Transverse);

// --- concurrence sweeps ------------------------------------------------------

std::vector<ConcurrencePoint> sweep_concurrence(const Spectrum& spectrum,
                                                double alpha,
                                                const SweepGrid& grid,
                                                std::pair<int, int> pair);
std::vector<ConcurrencePoint> sweep_concurrence_serial(
    const Spectrum& spectrum, double alpha, const SweepGrid& grid,
    std::pair<int, int> pair);
std::vector<ConcurrencePoint> sweep_concurrence(
    const SpinSystem& system, double alpha, const SweepGrid& grid,
    std::pair<int, int> pair = {1, 2},
    HamiltonianForm form = HamiltonianForm::Transverse);

// --- entanglement boundary ---------------------------------------------------

enum class BoundarySide { Positive, Negative };

enum class ThresholdStatus {
  Found,           // q crosses zero; beta_star holds the refined root
  NoEntanglement,  // q < 0 over the whole scan window: no boundary exists
};

struct ThresholdComponent {
  ThresholdStatus status = ThresholdStatus::NoEntanglement;
  double beta_star = std::numeric_limits<double>::quiet_NaN();
  double bracket_width = std::numeric_limits<double>::quiet_NaN();
  double q_at_root = std::numeric_limits<double>::quiet_NaN();
};

struct ThresholdResult {
  double alpha = 0.0;
  ThresholdComponent positive;
  ThresholdComponent negative;
};

// Locate the inverse temperature where q(beta) first crosses zero on one
// side, scanning |beta| in [0.1, 50] on a geometric coarse grid and bisecting
// the first sign change until bracket_width <= 1e-6 AND |q| <= 1e-8. The root
// is found on the continuous q, never on the clamped concurrence. A missing
// crossing is a NoEntanglement RESULT; q > 0 already at |beta| = 0.1 (root
// below the scan window) or non-finite q are thrown as numeric failures.
ThresholdComponent find_threshold(const Spectrum& spectrum, BoundarySide side,
                                  std::pair<int, int> pair = {1, 2},
                                  int coarse_points = 200);
ThresholdComponent find_threshold(
    const SpinSystem& system, double alpha, BoundarySide side,
    HamiltonianForm form = HamiltonianForm::Transverse,
    std::pair<int, int> pair = {1, 2}, int coarse_points = 200);
ThresholdResult find_thresholds(
    const SpinSystem& system, double alpha,
    HamiltonianForm form = HamiltonianForm::Transverse,
    std::pair<int, int> pair = {1, 2});

// --- S(E) curve ---------------------------------------------------------------

struct SvsEPoint {
  double energy = 0.0;
  double entropy = 0.0;
  double beta = 0.0;
};

// Parametric (E(beta), S(beta), beta) records along the grid, in grid order.
std::vector<SvsEPoint> s_vs_e_curve(
    const SpinSystem& system, double alpha, const SweepGrid& grid,
    HamiltonianForm form = HamiltonianForm::Transverse);

// --- physical units -----------------------------------------------------------

namespace constants {
inline constexpr double hbar_joule_s = 1.054571817e-34;
inline constexpr double boltzmann_joule_per_kelvin = 1.380649e-23;
}  // namespace constants

// Laboratory-side inputs for the dimensionless mapping. The gyromagnetic
// ratio is the NMR tabulated value in kHz per gauss, distances in angstrom,
// fields in gauss, temperatures in kelvin (signed).
struct PhysicalParams {
  double gamma_khz_per_gauss;
  double r12_angstrom;
  double field_gauss;
  double temperature_kelvin;
};

struct DimensionlessPoint {
  double alpha;
  double beta;
};

// Dipolar coupling frequency D = gamma^2 hbar / r12^3 in rad/s, evaluated in
// CGS units (gamma in rad s^-1 G^-1, hbar in erg s, r12 in cm).
double dipolar_frequency(const PhysicalParams& params);

// alpha = gamma H0 / D, beta = hbar D / (k T); throws for T = 0.
DimensionlessPoint dimensionless_from_physical(const PhysicalParams& params);

// Inverse of the beta mapping: T = hbar D / (k beta); throws for beta = 0.
double temperature_from_beta(const PhysicalParams& params, double beta);

// Order-of-magnitude temperature at which pair entanglement appears for a
// dipolar frequency omega_d (in Hz): T = hbar * 2 pi omega_d / k.
double estimate_entanglement_temperature(double omega_d_hz);

}  // namespace spintemp
