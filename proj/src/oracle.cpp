#include "certq/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "certq/errors.hpp"
#include "certq/linalg.hpp"

namespace certq {

namespace {

constexpr std::size_t kEnumMaxDim = 12;  // 3^12 ~ 531k cases, seconds at desk scale
constexpr double kBoundTol = 1e-9;
constexpr double kSignTol = 1e-9;

struct Candidate {
  double obj = std::numeric_limits<double>::infinity();
  std::uint64_t case_id = ~0ull;  // deterministic tie-break
  Vec y;

  bool better_than(const Candidate& other) const {
    if (obj != other.obj) return obj < other.obj;
    return case_id < other.case_id;
  }
};

// In-place Cholesky of the f x f submatrix Q[fidx, fidx], flat row-major.
// Never fails: principal submatrices of an SPD matrix are SPD.
void factor_submatrix(const DenseMatrix& Q, const std::vector<std::size_t>& fidx,
                      std::vector<double>& L) {
  const std::size_t f = fidx.size();
  L.assign(f * f, 0.0);
  for (std::size_t i = 0; i < f; ++i)
    for (std::size_t j = 0; j <= i; ++j) L[i * f + j] = Q(fidx[i], fidx[j]);
  for (std::size_t j = 0; j < f; ++j) {
    L[j * f + j] = std::sqrt(L[j * f + j]);
    for (std::size_t i = j + 1; i < f; ++i) L[i * f + j] /= L[j * f + j];
    for (std::size_t i = j + 1; i < f; ++i) {
      const double lij = L[i * f + j];
      for (std::size_t k = j + 1; k <= i; ++k) L[i * f + k] -= lij * L[k * f + j];
    }
  }
}

void solve_factored(const std::vector<double>& L, std::size_t f, std::vector<double>& x) {
  for (std::size_t i = 0; i < f; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= L[i * f + k] * x[k];
    x[i] = s / L[i * f + i];
  }
  for (std::size_t ii = f; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < f; ++k) s -= L[k * f + ii] * x[k];
    x[ii] = s / L[ii * f + ii];
  }
}

// Checks one fully assembled candidate point. scale guards the tolerances.
bool accept_candidate(const BoxQP& p, const Vec& y, const std::vector<std::size_t>& fidx,
                      const std::vector<std::size_t>& bidx, std::uint64_t pattern,
                      double scale) {
  for (std::size_t i : fidx) {
    if (y[i] < p.l[i] - kBoundTol * scale || y[i] > p.u[i] + kBoundTol * scale) return false;
  }
  // Multiplier signs on the bound set: grad >= 0 at lower, <= 0 at upper.
  for (std::size_t bi = 0; bi < bidx.size(); ++bi) {
    const std::size_t i = bidx[bi];
    double g = p.d[i];
    for (std::size_t j = 0; j < p.size(); ++j) g += p.Q(i, j) * y[j];
    const bool at_upper = (pattern >> bi) & 1u;
    if (at_upper ? g > kSignTol * scale : g < -kSignTol * scale) return false;
  }
  return true;
}

// Scans every bound pattern for one free set; updates `best`.
void scan_free_set(const BoxQP& p, std::uint64_t free_mask, Candidate& best,
                   std::vector<double>& L, std::vector<double>& rhs0, std::vector<double>& yf,
                   double scale) {
  const std::size_t n = p.size();
  std::vector<std::size_t> fidx, bidx;
  for (std::size_t i = 0; i < n; ++i) {
    ((free_mask >> i) & 1u) ? fidx.push_back(i) : bidx.push_back(i);
  }
  const std::size_t f = fidx.size();
  const std::size_t b = bidx.size();
  if (f > 0) factor_submatrix(p.Q, fidx, L);

  // Start from the all-at-lower pattern; Gray code flips one bound per step.
  Vec y(n);
  rhs0.assign(f, 0.0);
  for (std::size_t fi = 0; fi < f; ++fi) rhs0[fi] = -p.d[fidx[fi]];
  for (std::size_t bi = 0; bi < b; ++bi) {
    y[bidx[bi]] = p.l[bidx[bi]];
    for (std::size_t fi = 0; fi < f; ++fi) rhs0[fi] -= p.Q(fidx[fi], bidx[bi]) * p.l[bidx[bi]];
  }

  const std::uint64_t patterns = 1ull << b;
  std::uint64_t gray = 0;
  for (std::uint64_t step = 0;; ++step) {
    if (f > 0) {
      yf = rhs0;
      solve_factored(L, f, yf);
      for (std::size_t fi = 0; fi < f; ++fi) y[fidx[fi]] = yf[fi];
    }
    if (accept_candidate(p, y, fidx, bidx, gray, scale)) {
      Candidate cand;
      cand.obj = objective(p, y);
      cand.case_id = (free_mask << kEnumMaxDim) | gray;
      cand.y = y;
      if (cand.better_than(best)) best = cand;
    }
    if (step + 1 == patterns) break;

    const int bit = std::countr_zero(step + 1);
    const std::size_t i = bidx[static_cast<std::size_t>(bit)];
    const bool to_upper = !((gray >> bit) & 1u);
    gray ^= 1ull << bit;
    const double delta = to_upper ? p.u[i] - p.l[i] : p.l[i] - p.u[i];
    y[i] = to_upper ? p.u[i] : p.l[i];
    for (std::size_t fi = 0; fi < f; ++fi) rhs0[fi] -= p.Q(fidx[fi], i) * delta;
  }
}

double problem_scale(const BoxQP& p) {
  double s = std::max(1.0, inf_norm(p.d));
  s = std::max(s, inf_norm(p.Q));
  s = std::max(s, std::max(inf_norm(p.l), inf_norm(p.u)));
  return s;
}

}  // namespace

double objective(const BoxQP& p, const Vec& y) {
  const Vec qy = matvec(p.Q, y);
  return 0.5 * dot(y, qy) + dot(p.d, y);
}

double kkt_residual(const BoxQP& p, const Vec& y) {
  const Vec g = add(matvec(p.Q, y), p.d);
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double proj = std::clamp(y[i] - g[i], p.l[i], p.u[i]);
    r = std::max(r, std::fabs(y[i] - proj));
  }
  return r;
}

OracleResult solve_enumeration(const BoxQP& p) {
  const std::size_t n = p.size();
  if (n > kEnumMaxDim) {
    throw DimensionTooLarge("solve_enumeration: n = " + std::to_string(n) + " exceeds " +
                            std::to_string(kEnumMaxDim));
  }
  const double scale = problem_scale(p);
  const std::int64_t masks = 1ll << n;

  Candidate best;
#pragma omp parallel if (n >= 8)
  {
    Candidate local;
    std::vector<double> L, rhs0, yf;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t mask = 0; mask < masks; ++mask) {
      scan_free_set(p, static_cast<std::uint64_t>(mask), local, L, rhs0, yf, scale);
    }
#pragma omp critical
    {
      if (local.better_than(best)) best = local;
    }
  }

  if (!std::isfinite(best.obj)) {
    // Cannot happen for a valid SPD problem; the optimum is one of the cases.
    throw InvalidProblem("solve_enumeration: no KKT candidate found");
  }
  return {std::move(best.y), best.obj, OracleMethod::ActiveSetEnumeration};
}

OracleResult solve_enumeration_serial(const BoxQP& p) {
  const std::size_t n = p.size();
  if (n > kEnumMaxDim) {
    throw DimensionTooLarge("solve_enumeration_serial: n = " + std::to_string(n) + " exceeds " +
                            std::to_string(kEnumMaxDim));
  }
  const double scale = problem_scale(p);

  std::uint64_t cases = 1;
  for (std::size_t i = 0; i < n; ++i) cases *= 3;

  Candidate best;
  std::vector<std::size_t> fidx, bidx;
  for (std::uint64_t c = 0; c < cases; ++c) {
    // Ternary digits: 0 at lower, 1 at upper, 2 free.
    fidx.clear();
    bidx.clear();
    std::uint64_t pattern = 0;
    Vec y(n, 0.0);
    std::uint64_t t = c;
    for (std::size_t i = 0; i < n; ++i, t /= 3) {
      const int digit = static_cast<int>(t % 3);
      if (digit == 2) {
        fidx.push_back(i);
      } else {
        if (digit == 1) {
          pattern |= 1ull << bidx.size();
          y[i] = p.u[i];
        } else {
          y[i] = p.l[i];
        }
        bidx.push_back(i);
      }
    }

    if (!fidx.empty()) {
      DenseMatrix qff(fidx.size(), fidx.size());
      Vec rhs(fidx.size());
      for (std::size_t a = 0; a < fidx.size(); ++a) {
        for (std::size_t b = 0; b < fidx.size(); ++b) qff(a, b) = p.Q(fidx[a], fidx[b]);
        double s = -p.d[fidx[a]];
        for (std::size_t bi : bidx) s -= p.Q(fidx[a], bi) * y[bi];
        rhs[a] = s;
      }
      const Vec yf = solve_spd(cholesky(qff), rhs);
      for (std::size_t a = 0; a < fidx.size(); ++a) y[fidx[a]] = yf[a];
    }

    if (accept_candidate(p, y, fidx, bidx, pattern, scale)) {
      Candidate cand;
      cand.obj = objective(p, y);
      cand.case_id = c;
      cand.y = y;
      if (cand.better_than(best)) best = cand;
    }
  }

  if (!std::isfinite(best.obj)) {
    throw InvalidProblem("solve_enumeration_serial: no KKT candidate found");
  }
  return {std::move(best.y), best.obj, OracleMethod::ActiveSetEnumeration};
}

OracleResult solve_projected_gradient(const BoxQP& p, double tol) {
  const std::size_t n = p.size();
  const double L = std::max(inf_norm(p.Q), 1e-300);  // Gershgorin bound on lambda_max

  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = 0.5 * (p.l[i] + p.u[i]);

  constexpr std::uint64_t kMaxIters = 1000000;
  for (std::uint64_t it = 0; it < kMaxIters; ++it) {
    const Vec g = add(matvec(p.Q, y), p.d);
    double move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yn = std::clamp(y[i] - g[i] / L, p.l[i], p.u[i]);
      move = std::max(move, std::fabs(yn - y[i]));
      y[i] = yn;
    }
    if (move <= tol * std::max(1.0, inf_norm(y))) {
      const double obj = objective(p, y);
      return {std::move(y), obj, OracleMethod::ProjectedGradient};
    }
  }
  throw IterationLimit("solve_projected_gradient: no convergence within 1e6 iterations");
}

}  // namespace certq
