#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mebd {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

  cplx& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * dim_ + col]; }
  const cplx& operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * dim_ + col];
  }

  [[nodiscard]] std::span<cplx> data() noexcept { return data_; }
  [[nodiscard]] std::span<const cplx> data() const noexcept { return data_; }

  [[nodiscard]] ComplexMatrix adjoint() const;
  [[nodiscard]] cplx trace() const noexcept;
  [[nodiscard]] bool all_finite() const noexcept;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx scale) noexcept;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(cplx scale, ComplexMatrix m);

/// Largest entry-wise |a - b|; throws DimensionMismatch on shape disagreement.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// max |m - m^dagger| over entries.
double hermiticity_error(const ComplexMatrix& m) noexcept;

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kZeroEigenvalue = 1e-12;

struct SpectralForm {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix vectors;            // column k is the eigenvector of eigenvalues[k]
};

/// Full eigendecomposition of a Hermitian matrix.
///
/// Householder reduction to a real symmetric tridiagonal form followed by the
/// implicit QL iteration. Throws NotHermitian when the input deviates from its
/// adjoint by more than kHermitianTolerance, NonFinite on NaN/Inf entries and
/// ConvergenceFailure when an eigenvalue exceeds its QL iteration budget.
SpectralForm hermitian_eig(const ComplexMatrix& m);

/// Eigenvalues only (ascending). Same preconditions as hermitian_eig.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// U(tau) = V diag(exp(-i lambda tau)) V^dagger.
ComplexMatrix propagator(const SpectralForm& h, double tau);

/// u rho0 u^dagger. Throws DimensionMismatch.
ComplexMatrix conjugate_evolution(const ComplexMatrix& rho0, const ComplexMatrix& u);

/// 2 * sum of |lambda| over negative eigenvalues; |lambda| < kZeroEigenvalue counts as zero.
double negative_sum(std::span<const double> eigenvalues) noexcept;
double negative_sum(const ComplexMatrix& m);

}  // namespace mebd
