#include "certq/dense.hpp"

#include <cmath>
#include <cstdint>
#include <utility>

#include "certq/errors.hpp"

namespace certq {

namespace {
// Work below this many multiply-adds is not worth a parallel region.
constexpr std::size_t kParallelGrain = 1u << 16;
}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionMismatch("DenseMatrix: entries length " + std::to_string(data_.size()) +
                            " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(const Vec& d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

bool DenseMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionMismatch("matrix add: shape mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

namespace {

inline void matmul_row(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c,
                       std::size_t i) {
  const std::size_t n = a.cols();
  const std::size_t p = b.cols();
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
    c(i, j) = s;
  }
}

inline void check_matmul_dims(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
}

}  // namespace

DenseMatrix matmul_serial(const DenseMatrix& a, const DenseMatrix& b) {
  check_matmul_dims(a, b);
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, c, i);
  return c;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  check_matmul_dims(a, b);
  DenseMatrix c(a.rows(), b.cols());
  const std::size_t work = a.rows() * a.cols() * b.cols();
  const std::int64_t m = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static) if (work >= kParallelGrain)
  for (std::int64_t i = 0; i < m; ++i) {
    matmul_row(a, b, c, static_cast<std::size_t>(i));
  }
  return c;
}

Vec matvec_serial(const DenseMatrix& a, const Vec& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: shape mismatch");
  Vec y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

Vec matvec(const DenseMatrix& a, const Vec& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: shape mismatch");
  Vec y(a.rows());
  const std::size_t work = a.rows() * a.cols();
  const std::int64_t m = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static) if (work >= kParallelGrain)
  for (std::int64_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    y[i] = s;
  }
  return y;
}

Vec matvec_transposed(const DenseMatrix& a, const Vec& x) {
  if (a.rows() != x.size()) throw DimensionMismatch("matvec_transposed: shape mismatch");
  Vec y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
  }
  return y;
}

DenseMatrix transposed(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double inf_norm(const DenseMatrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) row += std::fabs(m(i, j));
    best = std::max(best, row);
  }
  return best;
}

Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scaled(const Vec& v, double s) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] * s;
  return r;
}

Vec constant_vec(std::size_t n, double value) { return Vec(n, value); }

}  // namespace certq
