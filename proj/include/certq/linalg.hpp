#pragma once

#include "certq/dense.hpp"

namespace certq {

/// Lower-triangular Cholesky factor L with L·Lᵀ equal to the factored matrix.
/// Diagonal entries are strictly positive by construction.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;
  explicit CholeskyFactor(DenseMatrix lower) : lower_(std::move(lower)) {}

  std::size_t dim() const { return lower_.rows(); }
  const DenseMatrix& lower() const { return lower_; }
  double operator()(std::size_t i, std::size_t j) const { return lower_(i, j); }

  /// Reconstructs L·Lᵀ.
  DenseMatrix reconstruct() const;

 private:
  DenseMatrix lower_;
};

/// Plain Cholesky, no pivoting: every matrix factored here is SPD by
/// construction. A pivot <= 1e-14 * max diagonal throws NotPositiveDefinite,
/// which signals an invalid Hessian upstream.
CholeskyFactor cholesky(const DenseMatrix& m);
CholeskyFactor cholesky_serial(const DenseMatrix& m);

/// Solves m·x = rhs given the factor of m (forward then back substitution).
Vec solve_spd(const CholeskyFactor& f, const Vec& rhs);

/// Matrix exponential by scaling-and-squaring with a degree-16 Taylor
/// polynomial on the scaled matrix (scaled inf-norm <= 0.5, truncation error
/// below 1e-12 a priori).
DenseMatrix expm_scaled(const DenseMatrix& m);

}  // namespace certq
