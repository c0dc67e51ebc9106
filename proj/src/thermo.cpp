#include "spintemp/thermo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spintemp {

ThermalState thermal_state(const Spectrum& spectrum, double beta) {
  if (!std::isfinite(beta)) {
    throw std::invalid_argument("thermal_state: beta must be finite");
  }
  if (!spectrum.eigenvalues.allFinite()) {
    throw std::invalid_argument(
        "thermal_state: spectrum contains non-finite eigenvalues");
  }

  // Weights exp(-(beta e_i - s)) with the shift s = min(beta e_i): the
  // dominant weight is exactly 1, everything else decays, so neither sign of
  // beta can overflow and the largest population never underflows.
  const Eigen::ArrayXd scaled = beta * spectrum.eigenvalues.array();
  const double shift = scaled.minCoeff();
  const Eigen::ArrayXd weights = (-(scaled - shift)).exp();
  const double total = weights.sum();  // >= 1 by construction

  ThermalState state;
  state.beta = beta;
  state.populations = (weights / total).matrix();
  state.spectrum = &spectrum;
  // log Z = log sum_i exp(-beta e_i), recovered exactly from the shifted sum.
  state.log_norm = std::log(total) - shift;

  const double psum = state.populations.sum();
  if (std::abs(psum - 1.0) > 1e-12) {
    throw std::runtime_error(
        "thermal_state: populations sum to " + std::to_string(psum) +
        " instead of 1 (numerical failure)");
  }
  return state;
}

double energy(const ThermalState& state) {
  return state.populations.dot(state.spectrum->eigenvalues);
}

double entropy(const ThermalState& state) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < state.populations.size(); ++i) {
    const double p = state.populations(i);
    if (p >= kPopulationFloor) s -= p * std::log(p);
  }
  // p ln p roundoff can leave a remainder of order -1e-16 for pure states.
  return std::max(s, 0.0);
}

double heat_capacity(const ThermalState& state) {
  // Centered second moment: exact fluctuation form, non-negative by
  // construction (no cancellation between <e^2> and <e>^2).
  const double mean = energy(state);
  const double variance =
      (state.populations.array() *
       (state.spectrum->eigenvalues.array() - mean).square())
          .sum();
  return state.beta * state.beta * variance;
}

ManyBodyOperator density_matrix(const ThermalState& state) {
  const Spectrum& spec = *state.spectrum;
  const CMatrix raw = spec.eigenvectors *
                      state.populations.cast<Complex>().asDiagonal() *
                      spec.eigenvectors.adjoint();
  // The populations are the eigenvalues (all >= 0), so the matrix is PSD by
  // construction; hermitize away the roundoff asymmetry of the triple product.
  CMatrix rho = 0.5 * (raw + raw.adjoint());
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-12) {
    throw std::runtime_error("density_matrix: trace is " +
                             std::to_string(trace) +
                             " instead of 1 (numerical failure)");
  }
  return ManyBodyOperator(n_spins_from_dim(spec.dim()), std::move(rho));
}

ThermoPoint thermo_point(const Spectrum& spectrum, double beta) {
  const ThermalState state = thermal_state(spectrum, beta);
  ThermoPoint point{beta, energy(state), entropy(state),
                    heat_capacity(state)};
  const int n = n_spins_from_dim(spectrum.dim());
  const double s_max = n * std::numbers::ln2;
  if (point.entropy > s_max + 1e-10) {
    throw std::runtime_error("thermo_point: entropy " +
                             std::to_string(point.entropy) +
                             " exceeds the N ln 2 bound " +
                             std::to_string(s_max));
  }
  return point;
}

}  // namespace spintemp
