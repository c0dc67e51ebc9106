#pragma once

#include <complex>

#include <Eigen/Dense>

// Dense spin-1/2 operator algebra: single-spin matrices, Kronecker embedding
// into a multi-spin register, and the Hermitian eigendecomposition everything
// downstream (thermal states, reduced states) is built on.

namespace spintemp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Hard cap on the register size. dim = 2^12 = 4096 is the largest dense
// problem this toolkit is meant for; beyond that you want sparse methods.
inline constexpr int kMaxSpins = 12;

enum class SpinAxis { X, Y, Z, Plus, Minus };

// Spin-1/2 operators in units of hbar: I_z = diag(1/2, -1/2), I_x = sigma_x/2,
// I_y = sigma_y/2, I_pm = I_x +- i I_y. Basis ordering: index 0 is |up>.
Eigen::Matrix2cd single_spin_operator(SpinAxis axis);

// Dense operator on an n-spin register. Convention used throughout: site 1 is
// the MOST significant bit of the basis index and bit value 0 encodes |up>,
// so site s occupies bit position (n_spins - s) counted from the LSB.
struct ManyBodyOperator {
  int n_spins;
  CMatrix matrix;

  ManyBodyOperator(int n_spins, CMatrix matrix);
  Eigen::Index dim() const { return matrix.rows(); }
};

// Kronecker product (dense, row-major blocks of a(i,j) * b).
CMatrix kron(const CMatrix& a, const CMatrix& b);

// op acting on `site` (1-based), identity on every other spin.
ManyBodyOperator embed(const Eigen::Matrix2cd& op, int site, int n_spins);

// Inverse of dim = 2^n; throws if dim is not a power of two within the cap.
int n_spins_from_dim(Eigen::Index dim);

// max_ij |M - M^dagger|: cheap gate applied before eigensolving.
double hermiticity_defect(const CMatrix& m);

// Eigenvalues in ascending order; eigenvector k sits in column k of
// `eigenvectors`, which is unitary.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  CMatrix eigenvectors;
  Eigen::Index dim() const { return eigenvalues.size(); }
};

// Full dense eigendecomposition of a Hermitian operator. Throws
// std::invalid_argument if the input is not Hermitian within 1e-12 and
// std::runtime_error if the solver fails or its output does not act like a
// spectral decomposition (checked on probe vectors, O(dim^2)).
Spectrum hermitian_eigendecomposition(const ManyBodyOperator& op);

}  // namespace spintemp
