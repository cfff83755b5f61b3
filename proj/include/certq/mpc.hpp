#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "certq/dense.hpp"
#include "certq/ipm.hpp"

namespace certq {

/// Continuous-time LTI plant: xdot = A x + B u, y = C x.
struct ContinuousLti {
  DenseMatrix A;
  DenseMatrix B;
  DenseMatrix C;

  std::size_t nx() const { return A.rows(); }
  std::size_t nu() const { return B.cols(); }
  std::size_t ny() const { return C.rows(); }
};

/// Zero-order-hold discretization: x+ = Ad x + Bd u, y = C x, sample time Ts.
struct DiscreteLti {
  DenseMatrix Ad;
  DenseMatrix Bd;
  DenseMatrix C;
  double Ts = 0.0;

  std::size_t nx() const { return Ad.rows(); }
  std::size_t nu() const { return Bd.cols(); }
  std::size_t ny() const { return C.rows(); }
};

/// Horizon, stage weights and input bounds. Stage cost over the horizon:
///   sum_{k=1..T} ||y_k - r_k||^2_Wy
/// + sum_{k=0..T-1} ||u_k||^2_Wu + ||u_k - u_{k-1}||^2_Wdu
/// (outputs penalized from k = 1, the first sample influenced by u_0).
struct MpcConfig {
  std::size_t horizon = 0;
  DenseMatrix Wy;
  DenseMatrix Wu;
  DenseMatrix Wdu;
  Vec umin;
  Vec umax;
};

/// The horizon cost condensed into a QP over the stacked input sequence
/// U in R^(nu*T). Predicted outputs are Y = Phi*x0 + Gamma*U; the Hessian Qqp
/// is constant, only the linear term depends on (x0, uprev, reference).
struct CondensedMpc {
  DiscreteLti model;
  MpcConfig config;
  DenseMatrix Phi;    // (ny*T) x nx, stacked C*Ad^k for k = 1..T
  DenseMatrix Gamma;  // (ny*T) x (nu*T), block lower-triangular impulse response
  DenseMatrix Qqp;    // n x n, n = nu*T, SPD (checked at build)

  // Cached pieces for the linear term.
  DenseMatrix GammaT;      // Gamma transposed
  DenseMatrix WyBar;       // blockdiag(Wy, T times)
  DenseMatrix StWduE;      // S' * blockdiag(Wdu) * E, maps uprev into d
  Vec l;                   // repeated umin
  Vec u;                   // repeated umax

  std::size_t n() const { return Qqp.rows(); }
};

/// One closed-loop sample: state/output/reference at time t and the input
/// applied over [t, t+Ts), plus the solver's iteration count and exit gap.
struct SimStep {
  double t = 0.0;
  Vec x;
  Vec y;
  Vec u;
  Vec r;
  int iterations = 0;
  double gap = 0.0;
};

struct SimLog {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nu = 0;
  std::vector<SimStep> steps;

  /// True when every step logged the same iteration count.
  bool iterations_invariant() const;

  /// CSV: t,x1..xnx,y1..yny,u1..unu,r1..rny,iters,gap with 12 significant
  /// digits per float.
  void write_csv(std::ostream& os) const;
};

/// (Ad, Bd) from the block matrix exponential of [[A, B], [0, 0]] * Ts.
DiscreteLti discretize_zoh(const ContinuousLti& m, double Ts);

/// Builds the prediction matrices and the constant Hessian
/// Qqp = 2 (Gamma' WyBar Gamma + WuBar + S' WduBar S). Throws
/// NotPositiveDefinite if the weights leave Qqp singular.
CondensedMpc condense(const DiscreteLti& model, const MpcConfig& cfg);

/// The QP for one sampling instant. rref stacks the horizon references
/// r_1..r_T (length ny*T); d = 2 (Gamma' WyBar (Phi x0 - rref) - S' WduBar E uprev).
BoxQP build_qp(const CondensedMpc& c, const Vec& x0, const Vec& uprev, const Vec& rref);

/// Receding-horizon simulation: at every step build the QP for the current
/// state, solve it, apply the first input block, advance the plant. The
/// per-step reference signal is held constant over the horizon and past the
/// end of `rref`. Solver errors propagate tagged with the step index.
SimLog simulate_closed_loop(const CondensedMpc& c, const Vec& x_init,
                            const std::vector<Vec>& rref, std::size_t steps, double eps);

/// The linearized AFTI-16 aircraft model (open-loop unstable; nx=4, nu=2,
/// ny=2 with y1 the angle of attack and y2 the pitch angle).
ContinuousLti afti16_model();

/// The AFTI-16 controller setup: Wy = diag(10,10), Wu = 0, Wdu = diag(0.1,0.1),
/// |u_i| <= 25 deg, for the given horizon.
MpcConfig afti16_config(std::size_t horizon);

}  // namespace certq
