#include "certq/mpc.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "certq/errors.hpp"
#include "certq/linalg.hpp"

namespace certq {

namespace {

void check_lti(const ContinuousLti& m) {
  if (!m.A.square()) throw DimensionMismatch("ContinuousLti: A not square");
  if (m.B.rows() != m.A.rows()) throw DimensionMismatch("ContinuousLti: B rows != nx");
  if (m.C.cols() != m.A.rows()) throw DimensionMismatch("ContinuousLti: C cols != nx");
}

// Block-diagonal repetition of W, `reps` times.
DenseMatrix block_diag_repeat(const DenseMatrix& w, std::size_t reps) {
  const std::size_t b = w.rows();
  DenseMatrix out(b * reps, b * reps);
  for (std::size_t r = 0; r < reps; ++r)
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < b; ++j) out(r * b + i, r * b + j) = w(i, j);
  return out;
}

}  // namespace

DiscreteLti discretize_zoh(const ContinuousLti& m, double Ts) {
  check_lti(m);
  if (!(Ts > 0.0)) throw InvalidProblem("discretize_zoh: Ts must be positive");
  const std::size_t nx = m.nx();
  const std::size_t nu = m.nu();

  DenseMatrix block(nx + nu, nx + nu);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nx; ++j) block(i, j) = m.A(i, j) * Ts;
    for (std::size_t j = 0; j < nu; ++j) block(i, nx + j) = m.B(i, j) * Ts;
  }
  const DenseMatrix e = expm_scaled(block);

  DiscreteLti d;
  d.Ad = DenseMatrix(nx, nx);
  d.Bd = DenseMatrix(nx, nu);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nx; ++j) d.Ad(i, j) = e(i, j);
    for (std::size_t j = 0; j < nu; ++j) d.Bd(i, j) = e(i, nx + j);
  }
  d.C = m.C;
  d.Ts = Ts;
  return d;
}

CondensedMpc condense(const DiscreteLti& model, const MpcConfig& cfg) {
  const std::size_t T = cfg.horizon;
  if (T < 1) throw InvalidProblem("condense: horizon must be >= 1");
  const std::size_t nx = model.nx();
  const std::size_t nu = model.nu();
  const std::size_t ny = model.ny();
  if (cfg.Wy.rows() != ny || cfg.Wy.cols() != ny || cfg.Wu.rows() != nu ||
      cfg.Wu.cols() != nu || cfg.Wdu.rows() != nu || cfg.Wdu.cols() != nu ||
      cfg.umin.size() != nu || cfg.umax.size() != nu) {
    throw DimensionMismatch("condense: weight/bound dimensions inconsistent with the model");
  }
  for (std::size_t i = 0; i < nu; ++i) {
    if (!(cfg.umin[i] < cfg.umax[i])) throw InvalidProblem("condense: umin < umax violated");
  }

  const std::size_t n = nu * T;

  // Impulse-response blocks M_k = C Ad^k Bd and output maps C Ad^(k+1).
  std::vector<DenseMatrix> impulse(T);   // impulse[k] = C Ad^k Bd
  std::vector<DenseMatrix> outmap(T);    // outmap[k]  = C Ad^(k+1)
  DenseMatrix CAk = model.C;             // C Ad^k while iterating
  for (std::size_t k = 0; k < T; ++k) {
    impulse[k] = matmul(CAk, model.Bd);
    CAk = matmul(CAk, model.Ad);
    outmap[k] = CAk;
  }

  CondensedMpc c;
  c.model = model;
  c.config = cfg;

  c.Phi = DenseMatrix(ny * T, nx);
  c.Gamma = DenseMatrix(ny * T, n);
  for (std::size_t k = 0; k < T; ++k) {  // block row k holds y_{k+1}
    for (std::size_t i = 0; i < ny; ++i)
      for (std::size_t j = 0; j < nx; ++j) c.Phi(k * ny + i, j) = outmap[k](i, j);
    for (std::size_t j = 0; j <= k; ++j) {
      const DenseMatrix& blk = impulse[k - j];
      for (std::size_t i = 0; i < ny; ++i)
        for (std::size_t jj = 0; jj < nu; ++jj) c.Gamma(k * ny + i, j * nu + jj) = blk(i, jj);
    }
  }

  // S maps U to input increments: +I diagonal blocks, -I subdiagonal.
  DenseMatrix S(n, n);
  for (std::size_t k = 0; k < T; ++k) {
    for (std::size_t i = 0; i < nu; ++i) {
      S(k * nu + i, k * nu + i) = 1.0;
      if (k > 0) S(k * nu + i, (k - 1) * nu + i) = -1.0;
    }
  }

  c.WyBar = block_diag_repeat(cfg.Wy, T);
  const DenseMatrix WuBar = block_diag_repeat(cfg.Wu, T);
  const DenseMatrix WduBar = block_diag_repeat(cfg.Wdu, T);

  c.GammaT = transposed(c.Gamma);
  const DenseMatrix St = transposed(S);

  DenseMatrix Qqp = matmul(c.GammaT, matmul(c.WyBar, c.Gamma));
  Qqp += WuBar;
  Qqp += matmul(St, matmul(WduBar, S));
  Qqp *= 2.0;
  c.Qqp = std::move(Qqp);
  cholesky(c.Qqp);  // SPD check; throws NotPositiveDefinite otherwise

  // S' WduBar E where E selects uprev into the first increment block.
  DenseMatrix E(n, nu);
  for (std::size_t i = 0; i < nu; ++i) E(i, i) = 1.0;
  c.StWduE = matmul(St, matmul(WduBar, E));

  c.l.resize(n);
  c.u.resize(n);
  for (std::size_t k = 0; k < T; ++k)
    for (std::size_t i = 0; i < nu; ++i) {
      c.l[k * nu + i] = cfg.umin[i];
      c.u[k * nu + i] = cfg.umax[i];
    }
  return c;
}

BoxQP build_qp(const CondensedMpc& c, const Vec& x0, const Vec& uprev, const Vec& rref) {
  const std::size_t T = c.config.horizon;
  const std::size_t ny = c.model.ny();
  if (x0.size() != c.model.nx() || uprev.size() != c.model.nu() || rref.size() != ny * T) {
    throw DimensionMismatch("build_qp: argument dimensions inconsistent with the controller");
  }

  Vec err = sub(matvec(c.Phi, x0), rref);       // Phi x0 - R
  Vec w = matvec(c.WyBar, err);                 // WyBar (Phi x0 - R)
  Vec d = matvec(c.GammaT, w);                  // Gamma' WyBar (Phi x0 - R)
  const Vec rate = matvec(c.StWduE, uprev);     // S' WduBar E uprev
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = 2.0 * (d[i] - rate[i]);

  BoxQP qp;
  qp.Q = c.Qqp;
  qp.d = std::move(d);
  qp.l = c.l;
  qp.u = c.u;
  return qp;
}

SimLog simulate_closed_loop(const CondensedMpc& c, const Vec& x_init,
                            const std::vector<Vec>& rref, std::size_t steps, double eps) {
  if (steps < 1) throw InvalidProblem("simulate_closed_loop: steps must be >= 1");
  if (rref.empty()) throw InvalidProblem("simulate_closed_loop: empty reference signal");
  const std::size_t T = c.config.horizon;
  const std::size_t ny = c.model.ny();
  const std::size_t nu = c.model.nu();

  SimLog log;
  log.nx = c.model.nx();
  log.ny = ny;
  log.nu = nu;
  log.steps.reserve(steps);

  Vec x = x_init;
  Vec uprev(nu, 0.0);
  for (std::size_t j = 0; j < steps; ++j) {
    const Vec& r_now = rref[std::min(j, rref.size() - 1)];
    if (r_now.size() != ny) throw DimensionMismatch("simulate_closed_loop: bad reference size");

    // Constant-over-horizon preview of the current reference.
    Vec R(ny * T);
    for (std::size_t k = 0; k < T; ++k)
      for (std::size_t i = 0; i < ny; ++i) R[k * ny + i] = r_now[i];

    SolveResult res;
    try {
      res = solve(build_qp(c, x, uprev, R), eps);
    } catch (const Error& e) {
      throw NumericalBreakdown(std::string("simulate_closed_loop: step ") + std::to_string(j) +
                                   ": " + e.what(),
                               0);
    }

    Vec u0(res.ystar.begin(), res.ystar.begin() + static_cast<long>(nu));
    SimStep step;
    step.t = static_cast<double>(j) * c.model.Ts;
    step.x = x;
    step.y = matvec(c.model.C, x);
    step.u = u0;
    step.r = r_now;
    step.iterations = res.iterations_run;
    step.gap = res.duality_gap;
    log.steps.push_back(std::move(step));

    Vec xn = matvec(c.model.Ad, x);
    const Vec bu = matvec(c.model.Bd, u0);
    x = add(xn, bu);
    uprev = std::move(u0);
  }
  return log;
}

bool SimLog::iterations_invariant() const {
  for (const auto& s : steps) {
    if (s.iterations != steps.front().iterations) return false;
  }
  return true;
}

void SimLog::write_csv(std::ostream& os) const {
  os << "t";
  for (std::size_t i = 1; i <= nx; ++i) os << ",x" << i;
  for (std::size_t i = 1; i <= ny; ++i) os << ",y" << i;
  for (std::size_t i = 1; i <= nu; ++i) os << ",u" << i;
  for (std::size_t i = 1; i <= ny; ++i) os << ",r" << i;
  os << ",iters,gap\n";

  char buf[64];
  auto put = [&](double v, bool lead_comma = true) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    if (lead_comma) os << ',';
    os << buf;
  };
  for (const auto& s : steps) {
    put(s.t, false);
    for (double v : s.x) put(v);
    for (double v : s.y) put(v);
    for (double v : s.u) put(v);
    for (double v : s.r) put(v);
    os << ',' << s.iterations;
    put(s.gap);
    os << '\n';
  }
}

ContinuousLti afti16_model() {
  ContinuousLti m;
  m.A = DenseMatrix(4, 4,
                    {-0.0151, -60.5651, 0.0, -32.174,   //
                     -0.0001, -1.3411, 0.9929, 0.0,     //
                     0.00018, 43.2541, -0.86939, 0.0,   //
                     0.0, 0.0, 1.0, 0.0});
  m.B = DenseMatrix(4, 2,
                    {-2.516, -13.136,   //
                     -0.1689, -0.2514,  //
                     -17.251, -1.5766,  //
                     0.0, 0.0});
  m.C = DenseMatrix(2, 4, {0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  return m;
}

MpcConfig afti16_config(std::size_t horizon) {
  MpcConfig cfg;
  cfg.horizon = horizon;
  cfg.Wy = DenseMatrix::diagonal({10.0, 10.0});
  cfg.Wu = DenseMatrix(2, 2);
  cfg.Wdu = DenseMatrix::diagonal({0.1, 0.1});
  cfg.umin = {-25.0, -25.0};
  cfg.umax = {25.0, 25.0};
  return cfg;
}

}  // namespace certq
