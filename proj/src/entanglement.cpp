#include "spintemp/entanglement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spintemp {

namespace {

// Bit positions (from the LSB) of an ordered site pair; site s of an n-spin
// register owns bit (n - s), so the smaller site index has the higher bit.
struct PairBits {
  int high;  // bit position of the smaller site index
  int low;   // bit position of the larger site index
};

PairBits pair_bits(int n_spins, std::pair<int, int> keep) {
  const int a = keep.first, b = keep.second;
  if (a == b) {
    throw std::invalid_argument("partial_trace: kept sites must be distinct, "
                                "got " + std::to_string(a) + " twice");
  }
  if (a < 1 || a > n_spins || b < 1 || b > n_spins) {
    throw std::invalid_argument(
        "partial_trace: sites (" + std::to_string(a) + ", " +
        std::to_string(b) + ") out of range for N = " +
        std::to_string(n_spins));
  }
  const int j = std::min(a, b), k = std::max(a, b);
  return {n_spins - j, n_spins - k};
}

// Full-register basis index with the pair bits (bj, bk) spliced into the
// remaining-spin index `rest` at positions p.high and p.low.
inline Eigen::Index splice_index(Eigen::Index rest, int bj, int bk,
                                 PairBits p) {
  const Eigen::Index low = rest & ((Eigen::Index{1} << p.low) - 1);
  const Eigen::Index mid =
      (rest >> p.low) & ((Eigen::Index{1} << (p.high - 1 - p.low)) - 1);
  const Eigen::Index high = rest >> (p.high - 1);
  return (high << (p.high + 1)) | (Eigen::Index{bj} << p.high) |
         (mid << (p.low + 1)) | (Eigen::Index{bk} << p.low) | low;
}

const Eigen::Matrix4cd& sigma_y_pair() {
  static const Eigen::Matrix4cd yy = [] {
    Eigen::Matrix4cd m;
    m << 0, 0, 0, -1,  //
        0, 0, 1, 0,    //
        0, 1, 0, 0,    //
        -1, 0, 0, 0;
    return m;
  }();
  return yy;
}

}  // namespace

TwoSpinState::TwoSpinState(Eigen::Matrix4cd m, int a, int b)
    : matrix(std::move(m)), site_a(a), site_b(b) {
  if (site_a >= site_b || site_a < 1) {
    throw std::invalid_argument("TwoSpinState: sites must satisfy 1 <= a < b");
  }
  const double defect = hermiticity_defect(matrix);
  if (!(defect <= 1e-10)) {
    throw std::invalid_argument(
        "TwoSpinState: matrix is not Hermitian (defect " +
        std::to_string(defect) + ")");
  }
  const double trace = matrix.trace().real();
  if (std::abs(trace - 1.0) > 1e-10) {
    throw std::invalid_argument("TwoSpinState: trace is " +
                                std::to_string(trace) + " instead of 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(
      matrix, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -1e-10) {
    throw std::invalid_argument(
        "TwoSpinState: matrix has a negative eigenvalue (" +
        std::to_string(min_eig) + "), not a density matrix");
  }
}

TwoSpinState partial_trace(const ManyBodyOperator& rho,
                           std::pair<int, int> keep) {
  const int n = rho.n_spins;
  if (n < 2) {
    throw std::invalid_argument(
        "partial_trace: need at least 2 spins to keep a pair");
  }
  const PairBits bits = pair_bits(n, keep);

  const double defect = hermiticity_defect(rho.matrix);
  if (!(defect <= 1e-10)) {
    throw std::invalid_argument("partial_trace: input is not Hermitian "
                                "(defect " + std::to_string(defect) + ")");
  }
  const double trace = rho.matrix.trace().real();
  if (std::abs(trace - 1.0) > 1e-10) {
    throw std::invalid_argument("partial_trace: input trace is " +
                                std::to_string(trace) + " instead of 1");
  }

  const Eigen::Index dim_rest = rho.dim() >> 2;
  Eigen::Matrix4cd reduced = Eigen::Matrix4cd::Zero();
  for (Eigen::Index rest = 0; rest < dim_rest; ++rest) {
    Eigen::Index idx[4];
    for (int a = 0; a < 4; ++a) {
      idx[a] = splice_index(rest, a >> 1, a & 1, bits);
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        reduced(a, b) += rho.matrix(idx[a], idx[b]);
      }
    }
  }
  return TwoSpinState(reduced, std::min(keep.first, keep.second),
                      std::max(keep.first, keep.second));
}

Eigen::Matrix4cd spin_flip(const TwoSpinState& rho12) {
  const Eigen::Matrix4cd& yy = sigma_y_pair();
  return yy * rho12.matrix.conjugate() * yy;
}

ConcurrenceValue concurrence(const TwoSpinState& rho12) {
  const Eigen::Matrix4cd r = rho12.matrix * spin_flip(rho12);

  // Saturated thermal states make every entry of R collapse toward the
  // underflow scale (~1e-170), where the QR iteration's deflation tests stop
  // working. Eigenvalues are linear in the matrix, so solve at unit max entry
  // and scale back; an exactly zero R short-circuits to all-zero lambdas.
  const double scale = r.cwiseAbs().maxCoeff();
  if (scale == 0.0) return {0.0, 0.0};
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(r / scale, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("concurrence: eigensolver for R failed");
  }

  std::array<double, 4> lambdas{};
  for (int k = 0; k < 4; ++k) {
    const Complex mu = solver.eigenvalues()(k);
    if (std::abs(mu.imag()) > 1e-8) {
      throw std::runtime_error(
          "concurrence: eigenvalue of R has relative imaginary part " +
          std::to_string(mu.imag()) +
          "; the reduced state is not a valid density matrix");
    }
    double re = mu.real();
    if (re < 0.0) {
      if (re < -1e-10) {
        throw std::runtime_error(
            "concurrence: eigenvalue of R is negative (relative " +
            std::to_string(re) +
            "); the reduced state is not a valid density matrix");
      }
      re = 0.0;  // roundoff below the tolerance
    }
    lambdas[k] = std::sqrt(re * scale);
  }
  std::sort(lambdas.begin(), lambdas.end(), std::greater<double>());

  const double q = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
  const double c = std::max(q, 0.0);
  if (c > 1.0 + 1e-10) {
    throw std::runtime_error("concurrence: value " + std::to_string(c) +
                             " exceeds 1; invalid input state");
  }
  return {q, c};
}

TwoSpinState reduced_thermal_state(const ThermalState& state,
                                   std::pair<int, int> keep) {
  const Spectrum& spec = *state.spectrum;
  const int n = n_spins_from_dim(spec.dim());
  if (n < 2) {
    throw std::invalid_argument(
        "reduced_thermal_state: need at least 2 spins");
  }
  const PairBits bits = pair_bits(n, keep);
  const Eigen::Index dim_rest = spec.dim() >> 2;

  // rho12[a,b] = sum_i p_i sum_rest V[idx_a, i] conj(V[idx_b, i]): identical
  // to reducing V diag(p) V^dagger, without forming the dim x dim product.
  Eigen::Matrix4cd reduced = Eigen::Matrix4cd::Zero();
  for (Eigen::Index i = 0; i < spec.dim(); ++i) {
    const double p = state.populations(i);
    if (p < kPopulationFloor) continue;
    for (Eigen::Index rest = 0; rest < dim_rest; ++rest) {
      Complex c[4];
      for (int a = 0; a < 4; ++a) {
        c[a] = spec.eigenvectors(splice_index(rest, a >> 1, a & 1, bits), i);
      }
      for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
          reduced(a, b) += p * c[a] * std::conj(c[b]);
        }
      }
    }
  }
  // Mirror the strict upper triangle: exactly Hermitian by construction.
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      reduced(b, a) = std::conj(reduced(a, b));
    }
  }
  return TwoSpinState(reduced, std::min(keep.first, keep.second),
                      std::max(keep.first, keep.second));
}

ConcurrencePoint thermal_concurrence(const SpinSystem& system, double alpha,
                                     double beta, std::pair<int, int> pair) {
  const ManyBodyOperator h = build_secular(system, alpha);
  const Spectrum spec = hermitian_eigendecomposition(h);
  const ThermalState state = thermal_state(spec, beta);
  const ManyBodyOperator rho = density_matrix(state);
  const TwoSpinState rho12 = partial_trace(rho, pair);
  const ConcurrenceValue value = concurrence(rho12);
  return ConcurrencePoint{beta, alpha, value.q_value, value.concurrence};
}

}  // namespace spintemp
