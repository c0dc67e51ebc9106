#include "spintemp/hamiltonian.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spintemp {

namespace {

// Single Kronecker chain over all sites with `a` at site j and `b` at site k
// (j < k), identity elsewhere. O(dim^2) instead of multiplying two embedded
// dim x dim matrices.
CMatrix two_site_product(const Eigen::Matrix2cd& a, int j,
                         const Eigen::Matrix2cd& b, int k, int n_spins) {
  const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
  CMatrix acc = CMatrix::Identity(1, 1);
  for (int s = 1; s <= n_spins; ++s) {
    const Eigen::Matrix2cd& factor = (s == j) ? a : (s == k) ? b : id2;
    acc = kron(acc, factor);
  }
  return acc;
}

CMatrix zeeman_term(int n_spins, double alpha) {
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  CMatrix h = CMatrix::Zero(dim, dim);
  if (alpha == 0.0) return h;
  const Eigen::Matrix2cd iz = single_spin_operator(SpinAxis::Z);
  for (int k = 1; k <= n_spins; ++k) {
    h += alpha * embed(iz, k, n_spins).matrix;
  }
  return h;
}

void check_alpha(double alpha) {
  if (!std::isfinite(alpha)) {
    throw std::invalid_argument("hamiltonian: alpha must be finite");
  }
}

ManyBodyOperator finish_hamiltonian(int n_spins, CMatrix h,
                                    const char* builder) {
  const double defect = hermiticity_defect(h);
  if (!(defect <= 1e-12)) {
    throw std::runtime_error(std::string(builder) +
                             ": assembled matrix is not Hermitian (defect " +
                             std::to_string(defect) + ")");
  }
  return ManyBodyOperator(n_spins, std::move(h));
}

}  // namespace

double coupling_constant(Geometry geometry, int n_spins, int m, int n) {
  if (m == n) {
    throw std::invalid_argument("coupling_constant: sites must differ, got " +
                                std::to_string(m) + " twice");
  }
  if (m < 1 || m > n_spins || n < 1 || n > n_spins) {
    throw std::invalid_argument("coupling_constant: sites (" +
                                std::to_string(m) + ", " + std::to_string(n) +
                                ") out of range for N = " +
                                std::to_string(n_spins));
  }
  const int separation = std::abs(m - n);
  switch (geometry) {
    case Geometry::Ring: {
      // Periodic site distance: sin(pi (N-d)/N) = sin(pi d/N) analytically,
      // but only the reduced distance makes nearest-neighbour couplings
      // exactly 1 in floating point (x/x for the wraparound pair too).
      const int d = std::min(separation, n_spins - separation);
      const double ratio = std::sin(std::numbers::pi / n_spins) /
                           std::sin(std::numbers::pi * d / n_spins);
      return ratio * ratio * ratio;
    }
    case Geometry::Chain: {
      const double d = static_cast<double>(separation);
      return 1.0 / (d * d * d);
    }
    case Geometry::Custom:
      throw std::invalid_argument(
          "coupling_constant: custom geometry carries its couplings in the "
          "SpinSystem table, not in a closed formula");
  }
  throw std::invalid_argument("coupling_constant: unknown geometry");
}

SpinSystem::SpinSystem(int n, Geometry g, Eigen::MatrixXd b)
    : n_spins(n), geometry(g), couplings(std::move(b)) {
  if (n_spins < 1 || n_spins > kMaxSpins) {
    throw std::invalid_argument("SpinSystem: n_spins must be in [1, " +
                                std::to_string(kMaxSpins) + "], got " +
                                std::to_string(n_spins));
  }
  if (couplings.rows() != n_spins || couplings.cols() != n_spins) {
    throw std::invalid_argument("SpinSystem: coupling table must be " +
                                std::to_string(n_spins) + "x" +
                                std::to_string(n_spins));
  }
  if (!couplings.allFinite()) {
    throw std::invalid_argument("SpinSystem: couplings must be finite");
  }
  for (int j = 0; j < n_spins; ++j) {
    if (couplings(j, j) != 0.0) {
      throw std::invalid_argument("SpinSystem: diagonal couplings must be 0");
    }
    for (int k = 0; k < n_spins; ++k) {
      if (couplings(j, k) < 0.0) {
        throw std::invalid_argument(
            "SpinSystem: couplings must be non-negative");
      }
      if (std::abs(couplings(j, k) - couplings(k, j)) > 1e-12) {
        throw std::invalid_argument(
            "SpinSystem: coupling table must be symmetric");
      }
    }
  }
}

SpinSystem SpinSystem::ring(int n) {
  if (n < 2) {
    throw std::invalid_argument("SpinSystem::ring: need at least 2 spins");
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int m = 1; m <= n; ++m) {
    for (int k = m + 1; k <= n; ++k) {
      b(m - 1, k - 1) = b(k - 1, m - 1) =
          coupling_constant(Geometry::Ring, n, m, k);
    }
  }
  return SpinSystem(n, Geometry::Ring, std::move(b));
}

SpinSystem SpinSystem::chain(int n) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int m = 1; m <= n; ++m) {
    for (int k = m + 1; k <= n; ++k) {
      b(m - 1, k - 1) = b(k - 1, m - 1) =
          coupling_constant(Geometry::Chain, n, m, k);
    }
  }
  return SpinSystem(n, Geometry::Chain, std::move(b));
}

SpinSystem SpinSystem::custom(const std::vector<Eigen::Vector3d>& coords) {
  const int n = static_cast<int>(coords.size());
  if (n < 2) {
    throw std::invalid_argument(
        "SpinSystem::custom: need at least 2 coordinates");
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double rho = (coords[k] - coords[j]).norm();
      if (rho <= 1e-12) {
        throw std::invalid_argument("SpinSystem::custom: spins " +
                                    std::to_string(j + 1) + " and " +
                                    std::to_string(k + 1) + " coincide");
      }
      b(j, k) = b(k, j) = 1.0 / (rho * rho * rho);
    }
  }
  return SpinSystem(n, Geometry::Custom, std::move(b));
}

SpinSystem SpinSystem::noninteracting(int n) {
  return SpinSystem(n, Geometry::Custom, Eigen::MatrixXd::Zero(n, n));
}

ManyBodyOperator build_secular(const SpinSystem& sys, double alpha) {
  check_alpha(alpha);
  const int n = sys.n_spins;
  const Eigen::Matrix2cd ix = single_spin_operator(SpinAxis::X);
  const Eigen::Matrix2cd iy = single_spin_operator(SpinAxis::Y);
  const Eigen::Matrix2cd iz = single_spin_operator(SpinAxis::Z);

  CMatrix h = zeeman_term(n, alpha);
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      const double b = sys.couplings(j - 1, k - 1);
      if (b == 0.0) continue;
      h += b * (2.0 * two_site_product(iz, j, iz, k, n) -
                two_site_product(ix, j, ix, k, n) -
                two_site_product(iy, j, iy, k, n));
    }
  }
  return finish_hamiltonian(n, std::move(h), "build_secular");
}

ManyBodyOperator build_transverse(const SpinSystem& sys, double alpha) {
  check_alpha(alpha);
  const int n = sys.n_spins;
  const Eigen::Matrix2cd ix = single_spin_operator(SpinAxis::X);
  const Eigen::Matrix2cd iy = single_spin_operator(SpinAxis::Y);
  const Eigen::Matrix2cd iz = single_spin_operator(SpinAxis::Z);

  CMatrix h = zeeman_term(n, alpha);
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      const double b = sys.couplings(j - 1, k - 1);
      if (b == 0.0) continue;
      h -= b * (2.0 * two_site_product(ix, j, ix, k, n) -
                two_site_product(iy, j, iy, k, n) -
                two_site_product(iz, j, iz, k, n));
    }
  }
  return finish_hamiltonian(n, std::move(h), "build_transverse");
}

ManyBodyOperator build_hamiltonian(const SpinSystem& sys, double alpha,
                                   HamiltonianForm form) {
  switch (form) {
    case HamiltonianForm::Secular:
      return build_secular(sys, alpha);
    case HamiltonianForm::Transverse:
      return build_transverse(sys, alpha);
  }
  throw std::invalid_argument("build_hamiltonian: unknown form");
}

ManyBodyOperator build_full_dipolar(const std::vector<Eigen::Vector3d>& coords,
                                    const Eigen::Vector3d& field_axis,
                                    double alpha) {
  check_alpha(alpha);
  const int n = static_cast<int>(coords.size());
  if (n < 2 || n > kMaxSpins) {
    throw std::invalid_argument(
        "build_full_dipolar: need between 2 and " +
        std::to_string(kMaxSpins) + " coordinates, got " + std::to_string(n));
  }
  if (field_axis.norm() <= 1e-12) {
    throw std::invalid_argument(
        "build_full_dipolar: field_axis must be a nonzero vector");
  }

  // Orthonormal frame with e3 along the field; the spin quantization axis z
  // is e3, so Zeeman stays alpha * sum I_kz in this frame. e1 is seeded from
  // the lab axis least aligned with the field to keep the frame deterministic.
  const Eigen::Vector3d e3 = field_axis.normalized();
  int least = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(e3(i)) < std::abs(e3(least))) least = i;
  }
  Eigen::Vector3d seed = Eigen::Vector3d::Zero();
  seed(least) = 1.0;
  const Eigen::Vector3d e1 = (seed - seed.dot(e3) * e3).normalized();
  const Eigen::Vector3d e2 = e3.cross(e1);

  const Eigen::Matrix2cd ix = single_spin_operator(SpinAxis::X);
  const Eigen::Matrix2cd iy = single_spin_operator(SpinAxis::Y);
  const Eigen::Matrix2cd iz = single_spin_operator(SpinAxis::Z);

  CMatrix h = zeeman_term(n, alpha);
  for (int j = 1; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      const Eigen::Vector3d r = coords[k - 1] - coords[j - 1];
      const double rho = r.norm();
      if (rho <= 1e-12) {
        throw std::invalid_argument("build_full_dipolar: spins " +
                                    std::to_string(j) + " and " +
                                    std::to_string(k) + " coincide");
      }
      const Eigen::Vector3d u = r / rho;
      // Spin operator along the inter-spin direction, expressed in the field
      // frame: I.u = (u.e1) I_x + (u.e2) I_y + (u.e3) I_z.
      const Eigen::Matrix2cd iu =
          u.dot(e1) * ix + u.dot(e2) * iy + u.dot(e3) * iz;
      const double w = 1.0 / (rho * rho * rho);
      h -= w * (3.0 * two_site_product(iu, j, iu, k, n) -
                (two_site_product(ix, j, ix, k, n) +
                 two_site_product(iy, j, iy, k, n) +
                 two_site_product(iz, j, iz, k, n)));
    }
  }
  return finish_hamiltonian(n, std::move(h), "build_full_dipolar");
}

}  // namespace spintemp
