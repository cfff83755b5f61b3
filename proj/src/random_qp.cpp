#include "certq/random_qp.hpp"

namespace certq {

namespace {

DenseMatrix random_spd(std::size_t n, Rng& rng) {
  DenseMatrix m(n, n);
  for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
  DenseMatrix q = matmul(transposed(m), m);
  for (std::size_t i = 0; i < n; ++i) q(i, i) += 1.0;
  return q;
}

}  // namespace

BoxQP random_box_qp(std::size_t n, Rng& rng) {
  BoxQP p;
  p.Q = random_spd(n, rng);
  p.d.resize(n);
  p.l.resize(n);
  p.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.d[i] = rng.uniform(-5.0, 5.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = rng.uniform(0.5, 2.0);
    p.l[i] = -s;
    p.u[i] = s;
  }
  return p;
}

BoxQP random_box_qp_asymmetric(std::size_t n, Rng& rng) {
  BoxQP p;
  p.Q = random_spd(n, rng);
  p.d.resize(n);
  p.l.resize(n);
  p.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.d[i] = rng.uniform(-5.0, 5.0);
  for (std::size_t i = 0; i < n; ++i) {
    p.l[i] = -rng.uniform(0.5, 2.0);
    p.u[i] = rng.uniform(0.5, 2.0);
  }
  return p;
}

}  // namespace certq
