#include "mebd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mebd/error.hpp"

namespace mebd {

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

cplx ComplexMatrix::trace() const noexcept {
  cplx t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

bool ComplexMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
}

}  // namespace

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scale) noexcept {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(cplx scale, ComplexMatrix m) { return m *= scale; }

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  require_same_dim(lhs, rhs);
  const std::size_t n = lhs.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx* out_row = &out(i, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx a = lhs(i, k);
      if (a == cplx{}) continue;
      const cplx* rhs_row = &rhs(k, 0);
      for (std::size_t j = 0; j < n; ++j) out_row[j] += a * rhs_row[j];
    }
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  double worst = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) worst = std::max(worst, std::abs(da[i] - db[i]));
  return worst;
}

double hermiticity_error(const ComplexMatrix& m) noexcept {
  double worst = 0.0;
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = r; c < m.dim(); ++c)
      worst = std::max(worst, std::abs(m(r, c) - std::conj(m(c, r))));
  return worst;
}

namespace {

constexpr int kMaxQlIterations = 30;

void check_hermitian_input(const ComplexMatrix& m) {
  if (!m.all_finite()) throw Error(ErrorKind::NonFinite, "matrix has NaN or Inf entries");
  const double err = hermiticity_error(m);
  if (err > kHermitianTolerance)
    throw Error(ErrorKind::NotHermitian, "max |m - m^dagger| = " + std::to_string(err));
}

// Real symmetric tridiagonal problem plus (optionally) the unitary that maps
// it back to the original basis. Rows of `basis_t` are the basis columns.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i+1; off[n-1] == 0
  std::vector<cplx> basis_t;
};

Tridiagonal householder_tridiagonalize(const ComplexMatrix& m, bool want_basis) {
  const std::size_t n = m.dim();
  std::vector<cplx> a(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a[r * n + c] = 0.5 * (m(r, c) + std::conj(m(c, r)));

  Tridiagonal t;
  t.diag.assign(n, 0.0);
  t.off.assign(n, 0.0);
  std::vector<cplx> sub(n, cplx{});
  if (want_basis) {
    t.basis_t.assign(n * n, cplx{});
    for (std::size_t i = 0; i < n; ++i) t.basis_t[i * n + i] = 1.0;
  }

  std::vector<cplx> u(n), p(n), s(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    // Column k below the diagonal, read through the Hermitian row, scaled by
    // its largest entry so tiny columns neither underflow nor overflow tau.
    double col_max = 0.0;
    for (std::size_t j = 1; j < len; ++j) col_max = std::max(col_max, std::abs(a[k * n + k + 1 + j]));
    const cplx x0 = std::conj(a[k * n + k + 1]);
    if (col_max == 0.0) {
      sub[k] = x0;
      continue;
    }
    col_max = std::max(col_max, std::abs(x0));
    for (std::size_t j = 0; j < len; ++j) u[j] = std::conj(a[k * n + k + 1 + j]) / col_max;
    double norm2 = 0.0;
    for (std::size_t j = 0; j < len; ++j) norm2 += std::norm(u[j]);
    const double abs_u0 = std::abs(u[0]);
    const double alpha = std::sqrt(norm2);
    const cplx phase = abs_u0 > 0.0 ? u[0] / abs_u0 : cplx{1.0};
    u[0] += phase * alpha;
    const double tau = 1.0 / (alpha * (alpha + abs_u0));
    sub[k] = -phase * (alpha * col_max);

    // B <- H B H on the trailing block, H = I - tau u u^dagger.
    double c = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const cplx* row = &a[(k + 1 + i) * n + k + 1];
      cplx acc = 0.0;
      for (std::size_t j = 0; j < len; ++j) acc += row[j] * u[j];
      p[i] = tau * acc;
      c += (std::conj(u[i]) * p[i]).real();
    }
    const double half = 0.5 * tau * c;
    for (std::size_t i = 0; i < len; ++i) p[i] -= half * u[i];
    for (std::size_t i = 0; i < len; ++i) {
      cplx* row = &a[(k + 1 + i) * n + k + 1];
      const cplx qi = p[i];
      const cplx ui = u[i];
      for (std::size_t j = 0; j < len; ++j) row[j] -= qi * std::conj(u[j]) + ui * std::conj(p[j]);
    }

    if (want_basis) {
      // Q <- Q H, stored transposed.
      std::fill(s.begin(), s.end(), cplx{});
      for (std::size_t j = 0; j < len; ++j) {
        const cplx* qrow = &t.basis_t[(k + 1 + j) * n];
        const cplx uj = u[j];
        for (std::size_t r = 0; r < n; ++r) s[r] += qrow[r] * uj;
      }
      for (std::size_t j = 0; j < len; ++j) {
        cplx* qrow = &t.basis_t[(k + 1 + j) * n];
        const cplx f = tau * std::conj(u[j]);
        for (std::size_t r = 0; r < n; ++r) qrow[r] -= s[r] * f;
      }
    }
  }
  if (n >= 2) sub[n - 2] = a[(n - 1) * n + n - 2];
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = a[i * n + i].real();

  // Rotate the complex off-diagonal onto the positive reals.
  cplx phi = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double mag = std::abs(sub[i]);
    t.off[i] = mag;
    const cplx next = mag > 0.0 ? phi * (sub[i] / mag) : phi;
    if (want_basis) {
      cplx* qrow = &t.basis_t[(i + 1) * n];
      for (std::size_t r = 0; r < n; ++r) qrow[r] *= next;
    }
    phi = next;
  }
  return t;
}

void implicit_ql(std::vector<double>& d, std::vector<double>& e, std::vector<cplx>* z_t) {
  const int n = static_cast<int>(d.size());
  constexpr double eps = std::numeric_limits<double>::epsilon();
  // Absolute deflation against the matrix scale; near-zero clusters would
  // otherwise never meet a purely relative test.
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(d[i]) + std::abs(e[i]));
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * (dd + scale)) break;
      }
      if (m == l) break;
      if (iter++ == kMaxQlIterations)
        throw Error(ErrorKind::ConvergenceFailure,
                    "QL iteration budget exceeded at eigenvalue " + std::to_string(l));
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      int i = m - 1;
      bool deflated = false;
      for (; i >= l; --i) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (z_t) {
          const std::size_t un = d.size();
          cplx* zi = &(*z_t)[static_cast<std::size_t>(i) * un];
          cplx* zi1 = &(*z_t)[static_cast<std::size_t>(i + 1) * un];
          for (std::size_t k = 0; k < un; ++k) {
            const cplx hold = zi1[k];
            zi1[k] = s * zi[k] + c * hold;
            zi[k] = c * zi[k] - s * hold;
          }
        }
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

}  // namespace

SpectralForm hermitian_eig(const ComplexMatrix& m) {
  check_hermitian_input(m);
  const std::size_t n = m.dim();
  Tridiagonal t = householder_tridiagonalize(m, true);
  implicit_ql(t.diag, t.off, &t.basis_t);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return t.diag[x] < t.diag[y]; });

  SpectralForm out;
  out.eigenvalues.resize(n);
  out.vectors = ComplexMatrix(n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.eigenvalues[col] = t.diag[src];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, col) = t.basis_t[src * n + r];
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  check_hermitian_input(m);
  Tridiagonal t = householder_tridiagonalize(m, false);
  implicit_ql(t.diag, t.off, nullptr);
  std::sort(t.diag.begin(), t.diag.end());
  return std::move(t.diag);
}

ComplexMatrix propagator(const SpectralForm& h, double tau) {
  const std::size_t n = h.vectors.dim();
  if (h.eigenvalues.size() != n)
    throw Error(ErrorKind::DimensionMismatch, "spectral form eigenvalue count != dimension");
  std::vector<cplx> phases(n);
  for (std::size_t k = 0; k < n; ++k) phases[k] = std::polar(1.0, -h.eigenvalues[k] * tau);

  ComplexMatrix out(n);
  std::vector<cplx> scaled(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) scaled[k] = h.vectors(r, k) * phases[k];
    for (std::size_t c = 0; c < n; ++c) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += scaled[k] * std::conj(h.vectors(c, k));
      out(r, c) = acc;
    }
  }
  return out;
}

ComplexMatrix conjugate_evolution(const ComplexMatrix& rho0, const ComplexMatrix& u) {
  require_same_dim(rho0, u);
  return (u * rho0) * u.adjoint();
}

double negative_sum(std::span<const double> eigenvalues) noexcept {
  double total = 0.0;
  for (const double lambda : eigenvalues)
    if (lambda < -kZeroEigenvalue) total -= lambda;
  return 2.0 * total;
}

double negative_sum(const ComplexMatrix& m) {
  const auto spectrum = hermitian_eigenvalues(m);
  return negative_sum(spectrum);
}

}  // namespace mebd
