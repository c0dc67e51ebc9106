#include "spintemp/spin_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spintemp {

namespace {
constexpr Complex kImag{0.0, 1.0};
}

Eigen::Matrix2cd single_spin_operator(SpinAxis axis) {
  Eigen::Matrix2cd m;
  switch (axis) {
    case SpinAxis::X:
      m << 0.0, 0.5, 0.5, 0.0;
      break;
    case SpinAxis::Y:
      m << 0.0, -0.5 * kImag, 0.5 * kImag, 0.0;
      break;
    case SpinAxis::Z:
      m << 0.5, 0.0, 0.0, -0.5;
      break;
    case SpinAxis::Plus:
      m << 0.0, 1.0, 0.0, 0.0;
      break;
    case SpinAxis::Minus:
      m << 0.0, 0.0, 1.0, 0.0;
      break;
    default:
      throw std::invalid_argument("single_spin_operator: unknown axis");
  }
  return m;
}

ManyBodyOperator::ManyBodyOperator(int n, CMatrix m)
    : n_spins(n), matrix(std::move(m)) {
  if (n_spins < 1 || n_spins > kMaxSpins) {
    throw std::invalid_argument("ManyBodyOperator: n_spins must be in [1, " +
                                std::to_string(kMaxSpins) + "], got " +
                                std::to_string(n_spins));
  }
  const Eigen::Index expected = Eigen::Index{1} << n_spins;
  if (matrix.rows() != expected || matrix.cols() != expected) {
    throw std::invalid_argument(
        "ManyBodyOperator: matrix is " + std::to_string(matrix.rows()) + "x" +
        std::to_string(matrix.cols()) + " but an " + std::to_string(n_spins) +
        "-spin register needs " + std::to_string(expected) + "x" +
        std::to_string(expected));
  }
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ManyBodyOperator embed(const Eigen::Matrix2cd& op, int site, int n_spins) {
  if (n_spins < 1 || n_spins > kMaxSpins) {
    throw std::invalid_argument("embed: n_spins must be in [1, " +
                                std::to_string(kMaxSpins) + "], got " +
                                std::to_string(n_spins));
  }
  if (site < 1 || site > n_spins) {
    throw std::invalid_argument("embed: site " + std::to_string(site) +
                                " out of range for a " +
                                std::to_string(n_spins) + "-spin register");
  }
  const Eigen::Index left = Eigen::Index{1} << (site - 1);
  const Eigen::Index right = Eigen::Index{1} << (n_spins - site);
  CMatrix m = kron(CMatrix::Identity(left, left),
                   kron(op, CMatrix::Identity(right, right)));
  return ManyBodyOperator(n_spins, std::move(m));
}

int n_spins_from_dim(Eigen::Index dim) {
  for (int n = 1; n <= kMaxSpins; ++n) {
    if ((Eigen::Index{1} << n) == dim) return n;
  }
  throw std::invalid_argument("n_spins_from_dim: dimension " +
                              std::to_string(dim) +
                              " is not 2^n for n in [1, " +
                              std::to_string(kMaxSpins) + "]");
}

double hermiticity_defect(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Spectrum hermitian_eigendecomposition(const ManyBodyOperator& op) {
  // maxCoeff can skip NaN entries, so the defect gate alone does not catch
  // non-finite input; reject it explicitly.
  if (!op.matrix.allFinite()) {
    throw std::invalid_argument(
        "hermitian_eigendecomposition: input has non-finite entries");
  }
  const double defect = hermiticity_defect(op.matrix);
  if (!(defect <= 1e-12)) {
    throw std::invalid_argument(
        "hermitian_eigendecomposition: input is not Hermitian (max |M - M^t*| "
        "= " +
        std::to_string(defect) + ")");
  }

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(op.matrix);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error(
        "hermitian_eigendecomposition: eigensolver did not converge");
  }
  Spectrum spec{solver.eigenvalues(), solver.eigenvectors()};
  if (!spec.eigenvalues.allFinite()) {
    throw std::runtime_error(
        "hermitian_eigendecomposition: non-finite eigenvalues");
  }

  // O(dim^2) spot checks on a fixed probe vector: V must act unitarily and
  // V diag(e) V^dagger must act like the input. Full-matrix residuals are
  // exercised in the test suite; these stay on in release builds.
  const Eigen::Index dim = spec.dim();
  Eigen::VectorXcd x(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    x(k) = Complex(std::cos(0.37 * static_cast<double>(k) + 0.2),
                   std::sin(0.61 * static_cast<double>(k)));
  }
  const double scale =
      std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff()) *
      std::sqrt(static_cast<double>(dim));

  Eigen::VectorXcd coeffs = spec.eigenvectors.adjoint() * x;
  const double unitarity_residual =
      ((spec.eigenvectors * coeffs) - x).cwiseAbs().maxCoeff();
  if (unitarity_residual > 1e-10 * std::sqrt(static_cast<double>(dim))) {
    throw std::runtime_error(
        "hermitian_eigendecomposition: eigenvector matrix is not unitary "
        "(probe residual " +
        std::to_string(unitarity_residual) + ")");
  }

  coeffs.array() *= spec.eigenvalues.cast<Complex>().array();
  const double reconstruction_residual =
      ((spec.eigenvectors * coeffs) - op.matrix * x).cwiseAbs().maxCoeff();
  if (reconstruction_residual > 1e-9 * scale) {
    throw std::runtime_error(
        "hermitian_eigendecomposition: spectral reconstruction off (probe "
        "residual " +
        std::to_string(reconstruction_residual) + ")");
  }
  return spec;
}

}  // namespace spintemp
