#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace certq {

using Vec = std::vector<double>;

/// Dense row-major matrix. The only matrix storage in the project; problem
/// sizes (n <= ~200) never justify sparsity.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(const Vec& d);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// True if every entry is finite (no NaN/Inf).
  bool all_finite() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Kernels. Each has a serial reference implementation (used by tests and the
// kernel benchmark) and a production variant that goes parallel via OpenMP
// above a size threshold. Arithmetic order per output element is identical in
// both variants, so results match bit for bit.
// ---------------------------------------------------------------------------

DenseMatrix matmul_serial(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

Vec matvec_serial(const DenseMatrix& a, const Vec& x);
Vec matvec(const DenseMatrix& a, const Vec& x);

/// y = Aᵀ x without materializing the transpose.
Vec matvec_transposed(const DenseMatrix& a, const Vec& x);

DenseMatrix transposed(const DenseMatrix& a);

// Small vector helpers.
double dot(const Vec& a, const Vec& b);
double inf_norm(const Vec& v);
double inf_norm(const DenseMatrix& m);  // max absolute row sum
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scaled(const Vec& v, double s);
Vec constant_vec(std::size_t n, double value);

}  // namespace certq
