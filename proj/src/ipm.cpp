#include "certq/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "certq/errors.hpp"
#include "certq/linalg.hpp"

namespace certq {

namespace {
// ||h||inf at or below this times max(1, ||H||inf) counts as h = 0. Exact
// zero is measure-zero under floating point after the box transformation.
constexpr double kZeroGradientTol = 1e-14;
}  // namespace

void validate(const BoxQP& p) {
  const std::size_t n = p.size();
  if (n == 0) throw InvalidProblem("BoxQP: empty problem");
  if (p.Q.rows() != n || p.Q.cols() != n || p.l.size() != n || p.u.size() != n) {
    throw InvalidProblem("BoxQP: inconsistent dimensions");
  }
  if (!p.Q.all_finite()) throw InvalidProblem("BoxQP: Q has non-finite entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p.d[i]) || !std::isfinite(p.l[i]) || !std::isfinite(p.u[i])) {
      throw InvalidProblem("BoxQP: non-finite vector entry at index " + std::to_string(i));
    }
    if (!(p.l[i] < p.u[i])) {
      throw InvalidProblem("BoxQP: bounds l < u violated at index " + std::to_string(i));
    }
  }
  double scale = 0.0;
  for (const double v : p.Q.data()) scale = std::max(scale, std::fabs(v));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::fabs(p.Q(i, j) - p.Q(j, i)) > 1e-10 * std::max(scale, 1.0)) {
        throw InvalidProblem("BoxQP: Q not symmetric at (" + std::to_string(i) + "," +
                             std::to_string(j) + ")");
      }
    }
  }
  try {
    cholesky(p.Q);
  } catch (const NotPositiveDefinite&) {
    throw InvalidProblem("BoxQP: Q is not positive definite");
  }
}

double path_eta(std::size_t n) { return 1.0 / (4.0 * std::sqrt(2.0 * static_cast<double>(n))); }

std::pair<DenseMatrix, Vec> to_scaled_box(const BoxQP& p) {
  const std::size_t n = p.size();
  Vec w(n);  // box widths u - l
  for (std::size_t i = 0; i < n; ++i) w[i] = p.u[i] - p.l[i];

  DenseMatrix H(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) H(i, j) = w[i] * p.Q(i, j) * w[j];

  Vec mid(n);
  for (std::size_t i = 0; i < n; ++i) mid[i] = p.u[i] + p.l[i];
  Vec qm = matvec(p.Q, mid);
  Vec h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = w[i] * (qm[i] + 2.0 * p.d[i]);
  return {std::move(H), std::move(h)};
}

Vec recover(const Vec& zstar, const Vec& l, const Vec& u) {
  if (zstar.size() != l.size() || l.size() != u.size()) {
    throw DimensionMismatch("recover: dimension mismatch");
  }
  Vec y(zstar.size());
  for (std::size_t i = 0; i < zstar.size(); ++i) {
    y[i] = 0.5 * (u[i] - l[i]) * zstar[i] + 0.5 * (u[i] + l[i]);
    y[i] = std::clamp(y[i], l[i], u[i]);
  }
  return y;
}

ScaledProblem scale_problem(DenseMatrix H, Vec h) {
  const std::size_t n = h.size();
  if (H.rows() != n || H.cols() != n) throw DimensionMismatch("scale_problem: shape mismatch");
  const double hinf = inf_norm(h);
  if (hinf == 0.0) throw ZeroGradient("scale_problem: h = 0; use the box-center shortcut");

  ScaledProblem sp;
  sp.hinf = hinf;
  sp.lambda = 1.0 / std::sqrt(static_cast<double>(n) + 1.0);
  sp.Htilde = H;
  sp.Htilde *= 1.0 / hinf;
  sp.htilde = scaled(h, 1.0 / hinf);
  sp.H = std::move(H);
  sp.h = std::move(h);
  return sp;
}

IterateState initialize(const ScaledProblem& sp) {
  const std::size_t n = sp.size();
  IterateState st;
  st.z.assign(n, 0.0);
  st.gamma.resize(n);
  st.theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.gamma[i] = 1.0 - sp.lambda * sp.htilde[i];
    st.theta[i] = 1.0 + sp.lambda * sp.htilde[i];
  }
  st.phi.assign(n, 1.0);
  st.psi.assign(n, 1.0);
  st.tau = 1.0 / (1.0 - path_eta(n));
  return st;
}

Certificate certified_iterations(std::size_t n, double eps) {
  if (n < 1) throw InvalidTolerance("certified_iterations: n must be >= 1");
  const double two_n = 2.0 * static_cast<double>(n);
  if (!(eps > 0.0) || !(eps < two_n)) {
    throw InvalidTolerance("certified_iterations: eps must lie in (0, 2n), got " +
                           std::to_string(eps));
  }
  Certificate c;
  c.n = n;
  c.eps = eps;
  c.eta = path_eta(n);
  c.tau0 = 1.0 / (1.0 - c.eta);
  c.lambda = 1.0 / std::sqrt(static_cast<double>(n) + 1.0);
  // log(2n) - log(eps) rather than log(2n/eps): the quotient overflows for
  // subnormal eps, which the (0, 2n) domain admits.
  const double ratio = (std::log(two_n) - std::log(eps)) / (-2.0 * std::log1p(-c.eta));
  c.iterations = static_cast<int>(std::ceil(ratio)) + 1;
  return c;
}

IterateState newton_step(const ScaledProblem& sp, const IterateState& st, double tau_next) {
  const std::size_t n = sp.size();

  // Newton matrix M = 2*lambda*Htilde + diag(gamma/phi) + diag(theta/psi).
  DenseMatrix M = sp.Htilde;
  M *= 2.0 * sp.lambda;
  Vec rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rg = st.gamma[i] / st.phi[i];
    const double rt = st.theta[i] / st.psi[i];
    M(i, i) += rg + rt;
    rhs[i] =
        2.0 * (std::sqrt(rt) * tau_next - std::sqrt(rg) * tau_next + st.gamma[i] - st.theta[i]);
  }

  Vec dz;
  try {
    dz = solve_spd(cholesky(M), rhs);
  } catch (const NotPositiveDefinite&) {
    throw NumericalBreakdown("newton_step: Newton matrix lost positive definiteness", 0);
  }

  IterateState next;
  next.z.resize(n);
  next.gamma.resize(n);
  next.theta.resize(n);
  next.phi.resize(n);
  next.psi.resize(n);
  next.tau = tau_next;
  for (std::size_t i = 0; i < n; ++i) {
    const double rg = st.gamma[i] / st.phi[i];
    const double rt = st.theta[i] / st.psi[i];
    const double dgamma = rg * dz[i] + 2.0 * (std::sqrt(rg) * tau_next - st.gamma[i]);
    const double dtheta = -rt * dz[i] + 2.0 * (std::sqrt(rt) * tau_next - st.theta[i]);
    next.z[i] = st.z[i] + dz[i];
    next.gamma[i] = st.gamma[i] + dgamma;
    next.theta[i] = st.theta[i] + dtheta;
    next.phi[i] = st.phi[i] - dz[i];
    next.psi[i] = st.psi[i] + dz[i];
    if (!(next.gamma[i] > 0.0) || !(next.theta[i] > 0.0) || !(next.phi[i] > 0.0) ||
        !(next.psi[i] > 0.0)) {
      throw NumericalBreakdown("newton_step: full step lost strict positivity", 0);
    }
  }
  return next;
}

double duality_gap(const IterateState& st) {
  return dot(st.gamma, st.phi) + dot(st.theta, st.psi);
}

IterationDiagnostics diagnostics(const ScaledProblem& sp, const IterateState& st, int k) {
  const std::size_t n = sp.size();
  IterationDiagnostics d;
  d.k = k;
  d.tau = st.tau;
  d.gap = duality_gap(st);

  // Proximity against the target of the next step, tau' = (1-eta)*tau. At the
  // start this is ||e - beta0|| and stays <= 1/sqrt(2) after every full step.
  const double tau_target = (1.0 - path_eta(n)) * st.tau;
  double ss = 0.0;
  double min_vs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double bg = std::sqrt(st.gamma[i] * st.phi[i]);
    const double bt = std::sqrt(st.theta[i] * st.psi[i]);
    ss += (tau_target - bg) * (tau_target - bg) + (tau_target - bt) * (tau_target - bt);
    min_vs = std::min({min_vs, st.gamma[i] * st.phi[i], st.theta[i] * st.psi[i]});
  }
  d.proximity = std::sqrt(ss) / tau_target;
  d.min_complementary = min_vs;

  Vec hz = matvec(sp.Htilde, st.z);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r =
        2.0 * sp.lambda * hz[i] + 2.0 * sp.lambda * sp.htilde[i] + st.gamma[i] - st.theta[i];
    res = std::max(res, std::fabs(r));
  }
  d.stationarity_residual = res;
  return d;
}

SolveResult solve(const BoxQP& p, double eps, bool trace) {
  validate(p);
  const std::size_t n = p.size();

  auto [H, h] = to_scaled_box(p);
  SolveResult out;
  if (inf_norm(h) <= kZeroGradientTol * std::max(1.0, inf_norm(H))) {
    out.zstar.assign(n, 0.0);
    out.ystar = recover(out.zstar, p.l, p.u);
    out.duality_gap = 0.0;
    out.iterations_run = 0;
    return out;
  }

  const ScaledProblem sp = scale_problem(std::move(H), std::move(h));
  const Certificate cert = certified_iterations(n, eps);
  IterateState st = initialize(sp);
  if (trace) out.trace.push_back(diagnostics(sp, st, 0));

  for (int k = 1; k <= cert.iterations; ++k) {
    const double tau_next = (1.0 - cert.eta) * st.tau;
    try {
      st = newton_step(sp, st, tau_next);
    } catch (const NumericalBreakdown& e) {
      throw NumericalBreakdown(e.what(), k);
    }
    const double gap = duality_gap(st);
    if (out.first_below_eps < 0 && gap <= eps) out.first_below_eps = k;
    if (trace) out.trace.push_back(diagnostics(sp, st, k));
  }

  out.zstar = st.z;
  out.ystar = recover(st.z, p.l, p.u);
  out.duality_gap = duality_gap(st);
  out.iterations_run = cert.iterations;
  return out;
}

void write_trace_csv(std::ostream& os, const std::vector<IterationDiagnostics>& trace) {
  os << "k,tau,gap,proximity,stationarity_residual,min_complementary\n";
  char buf[160];
  for (const auto& d : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", d.k, d.tau, d.gap,
                  d.proximity, d.stationarity_residual, d.min_complementary);
    os << buf;
  }
}

}  // namespace certq
