#include "spintemp/scan.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spintemp {

namespace {

// Run a per-index kernel over [0, n) with OpenMP, capturing the first
// exception instead of letting it escape the parallel region.
template <typename Kernel>
void parallel_for(int n, const Kernel& kernel) {
  std::exception_ptr error = nullptr;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      kernel(i);
    } catch (...) {
#pragma omp critical
      {
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

ConcurrencePoint concurrence_point_at(const Spectrum& spectrum, double alpha,
                                      double beta, std::pair<int, int> pair) {
  const ThermalState state = thermal_state(spectrum, beta);
  const ConcurrenceValue value =
      concurrence(reduced_thermal_state(state, pair));
  return ConcurrencePoint{beta, alpha, value.q_value, value.concurrence};
}

double q_value_at(const Spectrum& spectrum, double beta,
                  std::pair<int, int> pair) {
  const double q =
      concurrence(reduced_thermal_state(thermal_state(spectrum, beta), pair))
          .q_value;
  if (!std::isfinite(q)) {
    throw std::runtime_error("find_threshold: q(beta) is not finite at beta "
                             "= " + std::to_string(beta));
  }
  return q;
}

}  // namespace

SweepGrid::SweepGrid(double min, double max, int n)
    : beta_min(min), beta_max(max), n_points(n) {
  if (!std::isfinite(beta_min) || !std::isfinite(beta_max)) {
    throw std::invalid_argument("SweepGrid: endpoints must be finite");
  }
  if (!(beta_min < beta_max)) {
    throw std::invalid_argument("SweepGrid: beta_min (" +
                                std::to_string(beta_min) +
                                ") must be below beta_max (" +
                                std::to_string(beta_max) + ")");
  }
  if (n_points < 2) {
    throw std::invalid_argument("SweepGrid: need at least 2 points, got " +
                                std::to_string(n_points));
  }
}

std::vector<double> SweepGrid::values() const {
  std::vector<double> v(n_points);
  for (int i = 0; i < n_points; ++i) v[i] = at(i);
  return v;
}

std::vector<ThermoPoint> sweep_thermo(const Spectrum& spectrum,
                                      const SweepGrid& grid) {
  std::vector<ThermoPoint> out(grid.n_points);
  parallel_for(grid.n_points,
               [&](int i) { out[i] = thermo_point(spectrum, grid.at(i)); });
  return out;
}

std::vector<ThermoPoint> sweep_thermo_serial(const Spectrum& spectrum,
                                             const SweepGrid& grid) {
  std::vector<ThermoPoint> out(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    out[i] = thermo_point(spectrum, grid.at(i));
  }
  return out;
}

std::vector<ThermoPoint> sweep_thermo(const SpinSystem& system, double alpha,
                                      const SweepGrid& grid,
                                      HamiltonianForm form) {
  const Spectrum spectrum =
      hermitian_eigendecomposition(build_hamiltonian(system, alpha, form));
  return sweep_thermo(spectrum, grid);
}

std::vector<ConcurrencePoint> sweep_concurrence(const Spectrum& spectrum,
                                                double alpha,
                                                const SweepGrid& grid,
                                                std::pair<int, int> pair) {
  std::vector<ConcurrencePoint> out(grid.n_points);
  parallel_for(grid.n_points, [&](int i) {
    out[i] = concurrence_point_at(spectrum, alpha, grid.at(i), pair);
  });
  return out;
}

std::vector<ConcurrencePoint> sweep_concurrence_serial(
    const Spectrum& spectrum, double alpha, const SweepGrid& grid,
    std::pair<int, int> pair) {
  std::vector<ConcurrencePoint> out(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    out[i] = concurrence_point_at(spectrum, alpha, grid.at(i), pair);
  }
  return out;
}

std::vector<ConcurrencePoint> sweep_concurrence(const SpinSystem& system,
                                                double alpha,
                                                const SweepGrid& grid,
                                                std::pair<int, int> pair,
                                                HamiltonianForm form) {
  const Spectrum spectrum =
      hermitian_eigendecomposition(build_hamiltonian(system, alpha, form));
  return sweep_concurrence(spectrum, alpha, grid, pair);
}

ThresholdComponent find_threshold(const Spectrum& spectrum, BoundarySide side,
                                  std::pair<int, int> pair,
                                  int coarse_points) {
  if (coarse_points < 2) {
    throw std::invalid_argument(
        "find_threshold: coarse grid needs at least 2 points");
  }
  constexpr double kInner = 0.1;
  constexpr double kOuter = 50.0;
  const double sign = side == BoundarySide::Positive ? 1.0 : -1.0;

  const auto magnitude = [&](int i) {
    return i == coarse_points - 1
               ? kOuter
               : kInner * std::pow(kOuter / kInner,
                                   static_cast<double>(i) /
                                       (coarse_points - 1));
  };

  double prev_beta = sign * magnitude(0);
  double prev_q = q_value_at(spectrum, prev_beta, pair);
  if (prev_q >= 0.0) {
    throw std::runtime_error(
        "find_threshold: q is already non-negative at the inner scan edge "
        "|beta| = 0.1; the boundary lies below the scan window");
  }

  // Walk outward and bracket the FIRST sign change of q.
  double lo = 0.0, hi = 0.0, q_lo = 0.0;
  bool bracketed = false;
  for (int i = 1; i < coarse_points; ++i) {
    const double beta = sign * magnitude(i);
    const double q = q_value_at(spectrum, beta, pair);
    if (q > 0.0) {
      lo = prev_beta;
      hi = beta;
      q_lo = prev_q;
      bracketed = true;
      break;
    }
    if (q == 0.0) {
      // Landed exactly on the boundary: already converged.
      return ThresholdComponent{ThresholdStatus::Found, beta, 0.0, 0.0};
    }
    prev_beta = beta;
    prev_q = q;
  }
  if (!bracketed) {
    return ThresholdComponent{};  // q < 0 everywhere: no boundary to find
  }

  // Bisect on beta; lo/hi may be in either numeric order on the negative
  // side, which bisection does not care about as long as the signs differ.
  double mid = 0.5 * (lo + hi);
  double q_mid = q_value_at(spectrum, mid, pair);
  for (int iter = 0; iter < 200; ++iter) {
    if (q_mid == 0.0) break;
    if ((q_mid > 0.0) == (q_lo > 0.0)) {
      lo = mid;
      q_lo = q_mid;
    } else {
      hi = mid;
    }
    const double width = std::abs(hi - lo);
    if (width <= 1e-6 && std::abs(q_mid) <= 1e-8) break;
    if (width <=
        std::numeric_limits<double>::epsilon() * std::abs(lo)) {
      break;  // bracket exhausted at machine resolution
    }
    mid = 0.5 * (lo + hi);
    q_mid = q_value_at(spectrum, mid, pair);
  }

  const double width = std::abs(hi - lo);
  if (!(width <= 1e-6 && std::abs(q_mid) <= 1e-8)) {
    throw std::runtime_error(
        "find_threshold: bisection stalled (bracket " + std::to_string(width) +
        ", q " + std::to_string(q_mid) + ")");
  }
  return ThresholdComponent{ThresholdStatus::Found, mid, width, q_mid};
}

ThresholdComponent find_threshold(const SpinSystem& system, double alpha,
                                  BoundarySide side, HamiltonianForm form,
                                  std::pair<int, int> pair,
                                  int coarse_points) {
  const Spectrum spectrum =
      hermitian_eigendecomposition(build_hamiltonian(system, alpha, form));
  return find_threshold(spectrum, side, pair, coarse_points);
}

ThresholdResult find_thresholds(const SpinSystem& system, double alpha,
                                HamiltonianForm form,
                                std::pair<int, int> pair) {
  const Spectrum spectrum =
      hermitian_eigendecomposition(build_hamiltonian(system, alpha, form));
  ThresholdResult result;
  result.alpha = alpha;
  result.positive = find_threshold(spectrum, BoundarySide::Positive, pair);
  result.negative = find_threshold(spectrum, BoundarySide::Negative, pair);
  return result;
}

std::vector<SvsEPoint> s_vs_e_curve(const SpinSystem& system, double alpha,
                                    const SweepGrid& grid,
                                    HamiltonianForm form) {
  const std::vector<ThermoPoint> points =
      sweep_thermo(system, alpha, grid, form);
  std::vector<SvsEPoint> curve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    curve[i] = SvsEPoint{points[i].energy, points[i].entropy, points[i].beta};
  }
  return curve;
}

double dipolar_frequency(const PhysicalParams& p) {
  if (!(p.gamma_khz_per_gauss > 0.0)) {
    throw std::invalid_argument(
        "dipolar_frequency: gamma must be positive (kHz/G)");
  }
  if (!(p.r12_angstrom > 0.0)) {
    throw std::invalid_argument(
        "dipolar_frequency: r12 must be positive (angstrom)");
  }
  // CGS evaluation: gamma in rad s^-1 G^-1, hbar in erg s, r in cm.
  const double gamma_rad = 2.0 * std::numbers::pi * p.gamma_khz_per_gauss * 1e3;
  const double hbar_erg_s = constants::hbar_joule_s * 1e7;
  const double r_cm = p.r12_angstrom * 1e-8;
  return gamma_rad * gamma_rad * hbar_erg_s / (r_cm * r_cm * r_cm);
}

DimensionlessPoint dimensionless_from_physical(const PhysicalParams& p) {
  const double d = dipolar_frequency(p);
  if (p.temperature_kelvin == 0.0) {
    throw std::invalid_argument(
        "dimensionless_from_physical: temperature must be nonzero");
  }
  if (!std::isfinite(p.temperature_kelvin) || !std::isfinite(p.field_gauss)) {
    throw std::invalid_argument(
        "dimensionless_from_physical: field and temperature must be finite");
  }
  const double gamma_rad = 2.0 * std::numbers::pi * p.gamma_khz_per_gauss * 1e3;
  const double alpha = gamma_rad * p.field_gauss / d;
  const double beta = constants::hbar_joule_s * d /
                      (constants::boltzmann_joule_per_kelvin *
                       p.temperature_kelvin);
  return DimensionlessPoint{alpha, beta};
}

double temperature_from_beta(const PhysicalParams& p, double beta) {
  if (beta == 0.0 || !std::isfinite(beta)) {
    throw std::invalid_argument(
        "temperature_from_beta: beta must be finite and nonzero");
  }
  const double d = dipolar_frequency(p);
  return constants::hbar_joule_s * d /
         (constants::boltzmann_joule_per_kelvin * beta);
}

double estimate_entanglement_temperature(double omega_d_hz) {
  if (!(omega_d_hz > 0.0)) {
    throw std::invalid_argument(
        "estimate_entanglement_temperature: frequency must be positive");
  }
  return constants::hbar_joule_s * 2.0 * std::numbers::pi * omega_d_hz /
         constants::boltzmann_joule_per_kelvin;
}

}  // namespace spintemp
