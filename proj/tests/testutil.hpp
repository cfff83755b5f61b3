#pragma once

#include <cmath>

#include "certq/dense.hpp"
#include "certq/random_qp.hpp"

namespace certq::test {

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  }
  return m;
}

inline double rel_frobenius_error(const DenseMatrix& got, const DenseMatrix& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < want.data().size(); ++i) {
    const double d = got.data()[i] - want.data()[i];
    num += d * d;
    den += want.data()[i] * want.data()[i];
  }
  return std::sqrt(num) / std::sqrt(den);
}

inline DenseMatrix random_spd(std::size_t n, Rng& rng, double diag_boost = 1.0) {
  DenseMatrix m(n, n);
  for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
  DenseMatrix q = matmul(transposed(m), m);
  for (std::size_t i = 0; i < n; ++i) q(i, i) += diag_boost;
  return q;
}

}  // namespace certq::test
