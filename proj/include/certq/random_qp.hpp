#pragma once

#include <cstdint>
#include <random>

#include "certq/ipm.hpp"

namespace certq {

/// Seeded uniform draws via the portable mt19937_64 bit stream (the standard
/// distributions are implementation-defined, so the mapping is done by hand
/// to keep generated instances identical across platforms).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

/// The fixed benchmark instance scheme: Q = MᵀM + I with M entries uniform in
/// [-1,1], d uniform in [-5,5], bounds l = -e and u = e componentwise scaled
/// by uniform [0.5, 2].
BoxQP random_box_qp(std::size_t n, Rng& rng);

/// Variant with independently scaled lower/upper bounds, exercising the
/// asymmetric-box path of the transformation (test use).
BoxQP random_box_qp_asymmetric(std::size_t n, Rng& rng);

}  // namespace certq
