#include "certq/linalg.hpp"

#include <cmath>
#include <cstdint>

#include "certq/errors.hpp"

namespace certq {

namespace {
constexpr double kPivotTol = 1e-14;
// Trailing-update rows below this count stay serial.
constexpr std::size_t kCholParallelDim = 96;
}  // namespace

DenseMatrix CholeskyFactor::reconstruct() const {
  const std::size_t n = dim();
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += lower_(i, k) * lower_(j, k);
      m(i, j) = s;
      m(j, i) = s;
    }
  }
  return m;
}

namespace {

// Right-looking in-place factorization of the lower triangle. The trailing
// update owns disjoint rows per iteration, so the parallel and serial variants
// perform identical arithmetic per entry.
template <bool Parallel>
CholeskyFactor cholesky_impl(const DenseMatrix& m) {
  if (!m.square()) throw DimensionMismatch("cholesky: matrix not square");
  const std::size_t n = m.rows();

  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::fabs(m(i, i)));

  DenseMatrix L(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) L(i, j) = m(i, j);

  const double tol = kPivotTol * std::max(max_diag, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double pivot = L(j, j);
    if (pivot <= tol) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(pivot) + " at column " +
                                std::to_string(j));
    }
    const double ljj = std::sqrt(pivot);
    L(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) L(i, j) /= ljj;

    const std::int64_t first = static_cast<std::int64_t>(j) + 1;
    const std::int64_t last = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (Parallel && n - j > kCholParallelDim)
    for (std::int64_t i = first; i < last; ++i) {
      const double lij = L(static_cast<std::size_t>(i), j);
      for (std::int64_t k = first; k <= i; ++k) {
        L(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) -=
            lij * L(static_cast<std::size_t>(k), j);
      }
    }
  }
  return CholeskyFactor(std::move(L));
}

}  // namespace

CholeskyFactor cholesky(const DenseMatrix& m) { return cholesky_impl<true>(m); }

CholeskyFactor cholesky_serial(const DenseMatrix& m) { return cholesky_impl<false>(m); }

Vec solve_spd(const CholeskyFactor& f, const Vec& rhs) {
  const std::size_t n = f.dim();
  if (rhs.size() != n) {
    throw DimensionMismatch("solve_spd: rhs length " + std::to_string(rhs.size()) +
                            " != dim " + std::to_string(n));
  }
  const DenseMatrix& L = f.lower();
  Vec x = rhs;
  // L y = rhs
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= L(i, k) * x[k];
    x[i] = s / L(i, i);
  }
  // Lᵀ x = y
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= L(k, ii) * x[k];
    x[ii] = s / L(ii, ii);
  }
  return x;
}

DenseMatrix expm_scaled(const DenseMatrix& m) {
  if (!m.square()) throw DimensionMismatch("expm_scaled: matrix not square");
  const std::size_t n = m.rows();

  // Scale so the inf-norm is at most 1/2, run the Taylor polynomial, square
  // back. Degree 16 keeps the truncation remainder below 1e-19 at norm 1/2.
  const double norm = inf_norm(m);
  int squarings = 0;
  double scale = 1.0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    scale = std::ldexp(1.0, -squarings);
  }

  DenseMatrix a = m;
  a *= scale;

  constexpr int kOrder = 16;
  DenseMatrix sum = DenseMatrix::identity(n);
  DenseMatrix term = DenseMatrix::identity(n);
  for (int k = 1; k <= kOrder; ++k) {
    term = matmul(term, a);
    term *= 1.0 / static_cast<double>(k);
    sum += term;
  }

  for (int s = 0; s < squarings; ++s) sum = matmul(sum, sum);
  return sum;
}

}  // namespace certq
