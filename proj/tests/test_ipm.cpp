#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "certq/errors.hpp"
#include "certq/ipm.hpp"
#include "certq/linalg.hpp"
#include "certq/oracle.hpp"
#include "testutil.hpp"

using namespace certq;
using test::max_abs_diff;

namespace {

// Separable problems have the componentwise clip solution.
Vec clip_solution(const BoxQP& p) {
  Vec y(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    y[i] = std::clamp(-p.d[i] / p.Q(i, i), p.l[i], p.u[i]);
  }
  return y;
}

BoxQP one_dim(double q, double d, double l, double u) {
  BoxQP p;
  p.Q = DenseMatrix(1, 1, {q});
  p.d = {d};
  p.l = {l};
  p.u = {u};
  return p;
}

}  // namespace

TEST_CASE("to_scaled_box on the symmetric unit box is a pure width scaling") {
  BoxQP p;
  p.Q = DenseMatrix::identity(2);
  p.d = {0.0, 0.0};
  p.l = {-1.0, -1.0};
  p.u = {1.0, 1.0};
  const auto [H, h] = to_scaled_box(p);
  CHECK(max_abs_diff(H, DenseMatrix(2, 2, {4.0, 0.0, 0.0, 4.0})) == 0.0);
  CHECK(inf_norm(h) == 0.0);
}

TEST_CASE("to_scaled_box argmin equivalence on a separable instance") {
  BoxQP p;
  p.Q = DenseMatrix::diagonal({2.0, 2.0});
  p.d = {-2.0, -6.0};
  p.l = {-1.0, -1.0};
  p.u = {1.0, 1.0};
  const SolveResult res = solve(p, 1e-8);
  CHECK(max_abs_diff(res.ystar, clip_solution(p)) <= 1e-4);
  CHECK(max_abs_diff(res.ystar, {1.0, 1.0}) <= 1e-4);
}

TEST_CASE("to_scaled_box argmin equivalence against the enumeration oracle") {
  Rng rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    const BoxQP p = random_box_qp_asymmetric(5, rng);
    // The gap bounds the solution error loosely (~sqrt(eps)); eps = 1e-12
    // pins y* to the oracle within 1e-6.
    const SolveResult res = solve(p, 1e-12);
    const OracleResult oracle = solve_enumeration(p);
    CHECK(max_abs_diff(res.ystar, oracle.ystar) <= 1e-6);
  }
}

TEST_CASE("recover maps the scaled box back") {
  CHECK(max_abs_diff(recover({0.0, 0.0}, {-2.0, 0.0}, {4.0, 1.0}), {1.0, 0.5}) == 0.0);
  CHECK(max_abs_diff(recover({1.0, 1.0}, {-2.0, 0.0}, {4.0, 1.0}), {4.0, 1.0}) == 0.0);
  CHECK(max_abs_diff(recover({-1.0, -1.0}, {-2.0, 0.0}, {4.0, 1.0}), {-2.0, 0.0}) == 0.0);
  CHECK(recover({0.5}, {-2.0}, {4.0})[0] == doctest::Approx(2.5).epsilon(1e-15));
  // Roundoff excursions beyond the box are clamped.
  CHECK(recover({1.0 + 1e-12}, {-1.0}, {1.0})[0] == 1.0);
}

TEST_CASE("scale_problem normalizes h and fixes lambda") {
  {
    const ScaledProblem sp = scale_problem(DenseMatrix::identity(2), {3.0, -3.0});
    CHECK(max_abs_diff(sp.htilde, {1.0, -1.0}) == 0.0);
    CHECK(sp.Htilde(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(sp.hinf == 3.0);
  }
  {
    const ScaledProblem sp = scale_problem(DenseMatrix(1, 1, {2.0}), {0.5});
    CHECK(sp.htilde[0] == 1.0);
    CHECK(sp.Htilde(0, 0) == 4.0);
  }
  {
    const ScaledProblem sp = scale_problem(DenseMatrix::identity(3), {1.0, 0.0, 0.0});
    CHECK(sp.lambda == doctest::Approx(0.5).epsilon(1e-15));  // 1/sqrt(4)
  }
  CHECK_THROWS_AS(scale_problem(DenseMatrix::identity(2), {0.0, 0.0}), ZeroGradient);
}

TEST_CASE("initialize produces the cost-free strictly feasible point") {
  const ScaledProblem sp = scale_problem(DenseMatrix(1, 1, {1.0}), {2.0});
  REQUIRE(sp.lambda == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  const IterateState st = initialize(sp);

  CHECK(st.gamma[0] == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(st.theta[0] == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(st.phi[0] == 1.0);
  CHECK(st.psi[0] == 1.0);
  CHECK(st.z[0] == 0.0);
  CHECK(st.tau == doctest::Approx(1.0 / (1.0 - path_eta(1))).epsilon(1e-15));

  // Stationarity is an identity at the start: 2*lambda*htilde + gamma - theta = 0.
  const IterationDiagnostics d = diagnostics(sp, st);
  CHECK(d.stationarity_residual <= 1e-16);
  // gamma + theta = 2e makes the initial gap exactly 2n.
  CHECK(duality_gap(st) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("initial gap is 2n for every problem") {
  Rng rng(57);
  for (std::size_t n : {1u, 4u, 9u}) {
    const BoxQP p = random_box_qp(n, rng);
    const auto [H, h] = to_scaled_box(p);
    const ScaledProblem sp = scale_problem(H, h);
    CHECK(duality_gap(initialize(sp)) ==
          doctest::Approx(2.0 * static_cast<double>(n)).epsilon(1e-14));
  }
}

TEST_CASE("certified iteration counts match the published values") {
  CHECK(certified_iterations(10, 1e-6).iterations == 148);
  CHECK(certified_iterations(20, 1e-6).iterations == 219);
  CHECK(certified_iterations(30, 1e-6).iterations == 274);
  CHECK(certified_iterations(40, 1e-6).iterations == 322);
}

TEST_CASE("certificate fields and the eps domain") {
  const Certificate c = certified_iterations(10, 1e-6);
  CHECK(c.eta == doctest::Approx(1.0 / (4.0 * std::sqrt(20.0))).epsilon(1e-15));
  CHECK(c.lambda == doctest::Approx(1.0 / std::sqrt(11.0)).epsilon(1e-15));
  CHECK(c.tau0 == doctest::Approx(1.0 / (1.0 - c.eta)).epsilon(1e-15));
  CHECK(c.iterations >= 1);

  CHECK_THROWS_AS(certified_iterations(1, 2.0), InvalidTolerance);
  CHECK_THROWS_AS(certified_iterations(5, 0.0), InvalidTolerance);
  CHECK_THROWS_AS(certified_iterations(5, -1.0), InvalidTolerance);
  CHECK_NOTHROW(certified_iterations(1, 1.999));

  // Subnormal eps stays inside the domain and must not overflow the count.
  const Certificate tiny = certified_iterations(1, 1e-320);
  CHECK(tiny.iterations > 1000);
  CHECK(tiny.iterations < 10000);
}

// Independent scalar recomputation of one full Newton step for
// Q=(1), d=(0.5), l=(-1), u=(1): H=4, h=2, Htilde=2, htilde=1.
TEST_CASE("newton_step against a 1x1 hand computation") {
  const BoxQP p = one_dim(1.0, 0.5, -1.0, 1.0);
  const auto [H, h] = to_scaled_box(p);
  REQUIRE(H(0, 0) == 4.0);
  REQUIRE(h[0] == 2.0);

  const ScaledProblem sp = scale_problem(H, h);
  const IterateState st = initialize(sp);

  const double lambda = 1.0 / std::sqrt(2.0);
  const double eta = 1.0 / (4.0 * std::sqrt(2.0));
  const double tau1 = (1.0 - eta) * (1.0 / (1.0 - eta));  // = 1
  REQUIRE(tau1 == doctest::Approx(1.0).epsilon(1e-15));

  const double gamma0 = 1.0 - lambda;
  const double theta0 = 1.0 + lambda;
  const double m = 2.0 * lambda * 2.0 + gamma0 / 1.0 + theta0 / 1.0;
  const double rhs =
      2.0 * (std::sqrt(theta0) * tau1 - std::sqrt(gamma0) * tau1 + gamma0 - theta0);
  const double dz = rhs / m;
  const double dgamma = gamma0 * dz + 2.0 * (std::sqrt(gamma0) * tau1 - gamma0);
  const double dtheta = -theta0 * dz + 2.0 * (std::sqrt(theta0) * tau1 - theta0);

  const IterateState next = newton_step(sp, st, tau1);
  CHECK(next.z[0] == doctest::Approx(dz).epsilon(1e-15));
  CHECK(next.gamma[0] == doctest::Approx(gamma0 + dgamma).epsilon(1e-15));
  CHECK(next.theta[0] == doctest::Approx(theta0 + dtheta).epsilon(1e-15));
  CHECK(next.phi[0] == doctest::Approx(1.0 - dz).epsilon(1e-15));
  CHECK(next.psi[0] == doctest::Approx(1.0 + dz).epsilon(1e-15));

  CHECK(next.gamma[0] > 0.0);
  CHECK(next.theta[0] > 0.0);
  CHECK(next.phi[0] > 0.0);
  CHECK(next.psi[0] > 0.0);
  CHECK(duality_gap(next) <= 2.0 * tau1 * tau1);
}

TEST_CASE("full Newton steps keep the slack pairing exact") {
  Rng rng(71);
  const BoxQP p = random_box_qp(6, rng);
  const auto [H, h] = to_scaled_box(p);
  const ScaledProblem sp = scale_problem(H, h);
  const double eta = path_eta(6);

  IterateState st = initialize(sp);
  for (int k = 1; k <= 25; ++k) {
    const IterateState prev = st;
    st = newton_step(sp, st, (1.0 - eta) * st.tau);
    for (std::size_t i = 0; i < 6; ++i) {
      const double dz = st.z[i] - prev.z[i];
      CHECK(st.phi[i] == doctest::Approx(prev.phi[i] - dz).epsilon(1e-15));
      CHECK(st.psi[i] == doctest::Approx(prev.psi[i] + dz).epsilon(1e-15));
    }
  }
}

TEST_CASE("post-step gap lands in the deterministic sandwich") {
  Rng rng(73);
  for (std::size_t n : {1u, 3u, 8u}) {
    const BoxQP p = random_box_qp(n, rng);
    const auto [H, h] = to_scaled_box(p);
    const ScaledProblem sp = scale_problem(H, h);
    const double eta = path_eta(n);
    const double two_n = 2.0 * static_cast<double>(n);

    IterateState st = initialize(sp);
    const Certificate cert = certified_iterations(n, 1e-6);
    for (int k = 1; k <= cert.iterations; ++k) {
      st = newton_step(sp, st, (1.0 - eta) * st.tau);
      const double cap = two_n * st.tau * st.tau;
      const double gap = duality_gap(st);
      CHECK(gap <= cap * (1.0 + 1e-12));
      CHECK(gap >= cap * (1.0 - 1.0 / (4.0 * static_cast<double>(n))) * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("solve takes the box-center shortcut when h vanishes") {
  BoxQP p;
  p.Q = DenseMatrix::identity(2);
  p.l = {-1.0, 0.0};
  p.u = {3.0, 4.0};
  // d = -Q(u+l)/2 makes h = 0 exactly.
  p.d = {-1.0, -2.0};
  const SolveResult res = solve(p, 1e-6);
  CHECK(res.iterations_run == 0);
  CHECK(res.duality_gap == 0.0);
  CHECK(max_abs_diff(res.ystar, {1.0, 2.0}) == 0.0);
}

TEST_CASE("solve clips a 1-D unconstrained optimum into the box") {
  const SolveResult res = solve(one_dim(1.0, -10.0, -1.0, 1.0), 1e-6);
  CHECK(std::fabs(res.ystar[0] - 1.0) <= 1e-4);
  CHECK(res.iterations_run == certified_iterations(1, 1e-6).iterations);
}

TEST_CASE("solve matches the KKT point of a coupled 2-D instance") {
  BoxQP p;
  p.Q = DenseMatrix(2, 2, {2.0, 1.0, 1.0, 2.0});
  p.d = {-3.0, 0.0};
  p.l = {-1.0, -1.0};
  p.u = {1.0, 1.0};
  const SolveResult res = solve(p, 1e-8);
  CHECK(max_abs_diff(res.ystar, {1.0, -0.5}) <= 1e-4);
  CHECK(res.duality_gap <= 1e-8);
  CHECK(max_abs_diff(res.ystar, solve_enumeration(p).ystar) <= 1e-4);
}

TEST_CASE("solve validates the problem") {
  BoxQP p;
  p.Q = DenseMatrix(2, 2, {1.0, 0.9, 0.2, 1.0});  // asymmetric
  p.d = {0.0, 0.0};
  p.l = {-1.0, -1.0};
  p.u = {1.0, 1.0};
  CHECK_THROWS_AS(solve(p, 1e-6), InvalidProblem);

  p.Q = DenseMatrix(2, 2, {1.0, 2.0, 2.0, 1.0});  // indefinite
  CHECK_THROWS_AS(solve(p, 1e-6), InvalidProblem);

  p.Q = DenseMatrix::identity(2);
  p.l = {1.0, -1.0};
  p.u = {1.0, 1.0};  // l < u violated
  CHECK_THROWS_AS(solve(p, 1e-6), InvalidProblem);
}

TEST_CASE("iteration count is data independent") {
  Rng rng(83);
  const int expect = certified_iterations(7, 1e-6).iterations;
  for (int rep = 0; rep < 8; ++rep) {
    const BoxQP p =
        rep % 2 ? random_box_qp(7, rng) : random_box_qp_asymmetric(7, rng);
    CHECK(solve(p, 1e-6).iterations_run == expect);
  }
}

TEST_CASE("argmin is invariant under positive objective scaling") {
  Rng rng(89);
  const BoxQP p = random_box_qp_asymmetric(6, rng);
  const SolveResult base = solve(p, 1e-8);
  for (double c : {3.0, 0.02, 1500.0}) {
    BoxQP q = p;
    q.Q *= c;
    q.d = scaled(p.d, c);
    CHECK(max_abs_diff(solve(q, 1e-8).ystar, base.ystar) <= 1e-6);
  }
}

TEST_CASE("diagnostics: initial proximity matches its closed form and stays below 1/sqrt(2)") {
  Rng rng(97);
  for (std::size_t n : {1u, 5u, 12u}) {
    const BoxQP p = random_box_qp(n, rng);
    const auto [H, h] = to_scaled_box(p);
    const ScaledProblem sp = scale_problem(H, h);
    const IterateState st = initialize(sp);
    const IterationDiagnostics d0 = diagnostics(sp, st);

    // (1-eta)*tau0 = 1, so the initial proximity is ||e - beta0||.
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double bg = std::sqrt((1.0 - sp.lambda * sp.htilde[i]) * 1.0);
      const double bt = std::sqrt((1.0 + sp.lambda * sp.htilde[i]) * 1.0);
      ss += (1.0 - bg) * (1.0 - bg) + (1.0 - bt) * (1.0 - bt);
    }
    CHECK(d0.proximity == doctest::Approx(std::sqrt(ss)).epsilon(1e-12));
    CHECK(d0.proximity <= 1.0 / std::sqrt(2.0));
  }
}

TEST_CASE("traced solves expose the whole run") {
  Rng rng(103);
  const BoxQP p = random_box_qp(4, rng);
  const SolveResult res = solve(p, 1e-6, true);
  const int N = certified_iterations(4, 1e-6).iterations;
  REQUIRE(static_cast<int>(res.trace.size()) == N + 1);  // start plus every step
  CHECK(res.trace.front().k == 0);
  CHECK(res.trace.back().k == N);
  for (const auto& d : res.trace) {
    CHECK(d.proximity <= 1.0 / std::sqrt(2.0));
    CHECK(d.min_complementary > 0.0);
    CHECK(d.stationarity_residual <= 1e-9);
  }
  // No early exit, but the gap crossing is recorded for the tightness check.
  CHECK(res.first_below_eps >= N - 1);
  CHECK(res.first_below_eps <= N);
  CHECK(res.duality_gap <= 1e-6);
}

TEST_CASE("diagnostics of a perfectly centered hypothetical state") {
  // All complementarity products at 1 with the next target at tau' = 1.
  ScaledProblem sp;
  sp.H = DenseMatrix::identity(2);
  sp.h = {0.0, 0.0};
  sp.Htilde = DenseMatrix::identity(2);
  sp.htilde = {0.0, 0.0};
  sp.hinf = 1.0;
  sp.lambda = 1.0 / std::sqrt(3.0);

  IterateState st;
  st.z = {0.0, 0.0};
  st.gamma = {1.0, 1.0};
  st.theta = {1.0, 1.0};
  st.phi = {1.0, 1.0};
  st.psi = {1.0, 1.0};
  st.tau = 1.0 / (1.0 - path_eta(2));

  const IterationDiagnostics d = diagnostics(sp, st);
  CHECK(d.proximity == 0.0);
  CHECK(d.min_complementary == 1.0);
  CHECK(d.stationarity_residual == 0.0);
}

TEST_CASE("gap decays monotonically within the derived ratio band") {
  Rng rng(109);
  for (std::size_t n : {2u, 6u, 11u}) {
    const BoxQP p = random_box_qp(n, rng);
    const SolveResult res = solve(p, 1e-6, true);
    const double eta = path_eta(n);
    const double frac = 1.0 - 1.0 / (4.0 * static_cast<double>(n));
    const double lo = (1.0 - eta) * (1.0 - eta) * frac;
    const double hi = (1.0 - eta) * (1.0 - eta) / frac;
    // Post-step snapshots are trace[1..N]; the sandwich only binds after a step.
    for (std::size_t k = 2; k < res.trace.size(); ++k) {
      const double ratio = res.trace[k].gap / res.trace[k - 1].gap;
      CHECK(ratio >= lo * (1.0 - 1e-12));
      CHECK(ratio <= hi * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("the certificate is tight: the exit gap is not far below eps") {
  Rng rng(113);
  for (std::size_t n : {1u, 5u, 10u}) {
    const double eps = 1e-6;
    const BoxQP p = random_box_qp(n, rng);
    const SolveResult res = solve(p, eps);
    const double eta = path_eta(n);
    const double frac = 1.0 - 1.0 / (4.0 * static_cast<double>(n));
    CHECK(res.duality_gap <= eps);
    CHECK(res.duality_gap >= eps * (1.0 - eta) * (1.0 - eta) * frac);
  }
}

TEST_CASE("the IPM objective never beats the exact oracle") {
  Rng rng(127);
  for (int rep = 0; rep < 6; ++rep) {
    const BoxQP p = random_box_qp_asymmetric(7, rng);
    const SolveResult res = solve(p, 1e-8);
    const OracleResult oracle = solve_enumeration(p);
    const double f_ipm = objective(p, res.ystar);
    CHECK(oracle.objective <= f_ipm + 1e-12 * std::max(1.0, std::fabs(f_ipm)));
  }
}

TEST_CASE("feasibility identities hold to machine precision over a full run") {
  Rng rng(107);
  const BoxQP p = random_box_qp(9, rng);
  const auto [H, h] = to_scaled_box(p);
  const ScaledProblem sp = scale_problem(H, h);
  const double eta = path_eta(9);
  const Certificate cert = certified_iterations(9, 1e-6);

  IterateState st = initialize(sp);
  for (int k = 1; k <= cert.iterations; ++k) {
    st = newton_step(sp, st, (1.0 - eta) * st.tau);
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(std::fabs(st.z[i] + st.phi[i] - 1.0) <= 1e-12);
      CHECK(std::fabs(st.z[i] - st.psi[i] + 1.0) <= 1e-12);
    }
  }
}
