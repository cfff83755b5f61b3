#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "certq/dense.hpp"

namespace certq {

/// Box-constrained QP: minimize ½yᵀQy + yᵀd subject to l <= y <= u,
/// with Q symmetric positive definite and l < u componentwise.
struct BoxQP {
  DenseMatrix Q;
  Vec d;
  Vec l;
  Vec u;

  std::size_t size() const { return d.size(); }
};

/// Throws InvalidProblem if the BoxQP contract is violated (shape, finiteness,
/// symmetry within 1e-10 relative, l < u, Q positive definite).
void validate(const BoxQP& p);

/// The problem after mapping the box to [-1,1]^n and normalizing the linear
/// term: Htilde = H/||h||inf, htilde = h/||h||inf, lambda = 1/sqrt(n+1).
struct ScaledProblem {
  DenseMatrix H;
  Vec h;
  DenseMatrix Htilde;
  Vec htilde;
  double hinf = 0.0;
  double lambda = 0.0;

  std::size_t size() const { return h.size(); }
};

/// Full primal-dual iterate. gamma/theta are the multipliers of the upper and
/// lower box constraints, phi = e - z and psi = z + e their slacks; all four
/// stay strictly positive along the whole run. tau is the central-path target
/// the state was last stepped toward.
struct IterateState {
  Vec z;
  Vec gamma;
  Vec theta;
  Vec phi;
  Vec psi;
  double tau = 0.0;
};

/// Everything fixed before iteration 1. The solve loop runs exactly
/// `iterations` full Newton steps, independent of the problem data.
struct Certificate {
  std::size_t n = 0;
  double eps = 0.0;
  double eta = 0.0;
  double tau0 = 0.0;
  double lambda = 0.0;
  int iterations = 0;
};

/// Per-iteration snapshot, recomputable from the iterate it describes.
struct IterationDiagnostics {
  int k = 0;
  double tau = 0.0;
  double gap = 0.0;
  double proximity = 0.0;
  double stationarity_residual = 0.0;
  double min_complementary = 0.0;
};

struct SolveResult {
  Vec ystar;
  Vec zstar;
  double duality_gap = 0.0;
  int iterations_run = 0;
  /// First iteration whose exit gap was <= eps (-1 when h = 0 shortcut fired).
  int first_below_eps = -1;
  std::vector<IterationDiagnostics> trace;
};

/// eta = 1/(4*sqrt(2n)), the fixed tau shrink rate.
double path_eta(std::size_t n);

/// Maps the box QP onto [-1,1]^n: H = diag(u-l) Q diag(u-l),
/// h = diag(u-l) (Q(u+l) + 2d). Minimizing ½zᵀHz + zᵀh over the unit box is
/// equivalent to the original problem under `recover`.
std::pair<DenseMatrix, Vec> to_scaled_box(const BoxQP& p);

/// y = ½ diag(u-l) z + ½(u+l), clamped into [l,u] to absorb roundoff.
Vec recover(const Vec& zstar, const Vec& l, const Vec& u);

/// Normalizes (H, h) by ||h||inf and fixes lambda = 1/sqrt(n+1).
/// Throws ZeroGradient when h = 0; callers must use the box-center shortcut.
ScaledProblem scale_problem(DenseMatrix H, Vec h);

/// The cost-free strictly feasible start: z = 0, gamma = e - lambda*htilde,
/// theta = e + lambda*htilde, phi = psi = e, tau = 1/(1-eta). The stationarity
/// residual is zero by construction.
IterateState initialize(const ScaledProblem& sp);

/// Closed-form iteration count: ceil(log(2n/eps) / (-2 log(1-eta))) + 1.
/// Throws InvalidTolerance unless 0 < eps < 2n.
Certificate certified_iterations(std::size_t n, double eps);

/// One full Newton step toward the complementarity target tau_next^2
/// (callers pass tau_next = (1-eta)*st.tau). No line search: proximity below
/// 1/sqrt(2) keeps the full step strictly feasible. Throws NumericalBreakdown
/// if positivity is lost or the Newton matrix stops being SPD.
IterateState newton_step(const ScaledProblem& sp, const IterateState& st, double tau_next);

/// gamma'phi + theta'psi, the duality gap v's of the scaled problem.
double duality_gap(const IterateState& st);

/// Runs Algorithm: transform, scale, initialize, then exactly
/// certified_iterations(n, eps).iterations full Newton steps -- no early exit.
/// When h = 0 the optimum is the box center and no iterations run.
SolveResult solve(const BoxQP& p, double eps, bool trace = false);

/// Gap, proximity ||tau' e - beta|| / tau' with beta = sqrt(vs) and
/// tau' = (1-eta) tau (the target of the next step), stationarity residual and
/// min complementarity product of the given iterate.
IterationDiagnostics diagnostics(const ScaledProblem& sp, const IterateState& st, int k = 0);

/// Writes a trace as CSV: k,tau,gap,proximity,stationarity_residual,min_complementary.
void write_trace_csv(std::ostream& os, const std::vector<IterationDiagnostics>& trace);

}  // namespace certq
