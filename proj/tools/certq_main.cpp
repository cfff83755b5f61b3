// certq command line: certificate queries, single solves from JSON problem
// files, the AFTI-16 closed-loop demo, and a randomized verification bench.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "certq/errors.hpp"
#include "certq/ipm.hpp"
#include "certq/mpc.hpp"
#include "certq/oracle.hpp"
#include "certq/problem_io.hpp"
#include "certq/random_qp.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

int cmd_certify(std::size_t n, double eps) {
  const certq::Certificate c = certq::certified_iterations(n, eps);
  std::cout << "n=" << c.n << " eps=" << fmt(c.eps) << " N=" << c.iterations
            << " eta=" << fmt(c.eta) << " lambda=" << fmt(c.lambda) << " tau0=" << fmt(c.tau0)
            << "\n";
  return 0;
}

int cmd_solve(const std::string& path, double eps, const std::string& trace_path) {
  const certq::BoxQP p = certq::load_box_qp_file(path);
  const certq::SolveResult res = certq::solve(p, eps, !trace_path.empty());

  std::cout << "iterations=" << res.iterations_run << "\n";
  std::cout << "gap=" << fmt(res.duality_gap) << "\n";
  std::cout << "y*=";
  for (std::size_t i = 0; i < res.ystar.size(); ++i) {
    if (i) std::cout << ' ';
    std::cout << fmt(res.ystar[i]);
  }
  std::cout << "\n";

  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw certq::InvalidProblem("cannot open trace output \"" + trace_path + "\"");
    certq::write_trace_csv(out, res.trace);
  }
  return 0;
}

std::vector<certq::Vec> square_wave_reference(std::size_t steps, double Ts, double amplitude,
                                              double t_switch) {
  std::vector<certq::Vec> r(steps);
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = static_cast<double>(j) * Ts;
    r[j] = {0.0, t < t_switch ? amplitude : 0.0};
  }
  return r;
}

int cmd_demo_afti16(std::size_t T, double eps, const std::string& out_path, std::size_t steps,
                    double amplitude, double t_switch) {
  const certq::DiscreteLti plant = certq::discretize_zoh(certq::afti16_model(), 0.05);
  const certq::CondensedMpc ctrl = certq::condense(plant, certq::afti16_config(T));
  const auto rref = square_wave_reference(steps, plant.Ts, amplitude, t_switch);

  const certq::SimLog log =
      certq::simulate_closed_loop(ctrl, certq::Vec(plant.nx(), 0.0), rref, steps, eps);

  std::ofstream out(out_path);
  if (!out) throw certq::InvalidProblem("cannot open output \"" + out_path + "\"");
  log.write_csv(out);

  if (!log.iterations_invariant()) {
    std::cerr << "iteration count varied across sampling steps\n";
    return kExitNumerical;
  }
  std::cout << "iters=" << log.steps.front().iterations << " (all " << steps
            << " steps identical)\n";
  std::cout << "n=" << ctrl.n() << " csv=" << out_path << "\n";
  return 0;
}

std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t i) {
  return seed ^ (n * 0x9E3779B97F4A7C15ull) ^ (i * 0xBF58476D1CE4E5B9ull);
}

int cmd_bench(std::size_t count, std::size_t nmax, double eps, std::uint64_t seed) {
  std::cout << "bench seed=" << seed << " count=" << count << " nmax=" << nmax
            << " eps=" << fmt(eps) << "\n";

  double global_dev = 0.0;
  bool all_certified = true;
  for (std::size_t n = 1; n <= nmax; ++n) {
    const certq::Certificate cert = certq::certified_iterations(n, eps);
    std::vector<double> dev(count);
    std::vector<int> iters(count);
    std::vector<int> first(count);

    const std::int64_t m = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < m; ++i) {
      certq::Rng rng(instance_seed(seed, n, static_cast<std::uint64_t>(i)));
      const certq::BoxQP p = certq::random_box_qp(n, rng);
      const certq::SolveResult res = certq::solve(p, eps);
      const certq::OracleResult oracle = certq::solve_enumeration(p);
      double dmax = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        dmax = std::max(dmax, std::fabs(res.ystar[k] - oracle.ystar[k]));
      }
      dev[static_cast<std::size_t>(i)] = dmax;
      iters[static_cast<std::size_t>(i)] = res.iterations_run;
      first[static_cast<std::size_t>(i)] = res.first_below_eps;
    }

    double max_dev = 0.0;
    bool constant = true;
    std::size_t at_nm1 = 0, at_n = 0, other = 0;
    for (std::size_t i = 0; i < count; ++i) {
      max_dev = std::max(max_dev, dev[i]);
      if (iters[i] != cert.iterations) constant = false;
      if (first[i] == cert.iterations - 1) {
        ++at_nm1;
      } else if (first[i] == cert.iterations) {
        ++at_n;
      } else {
        ++other;
      }
    }
    global_dev = std::max(global_dev, max_dev);
    all_certified = all_certified && constant;

    std::cout << "n=" << n << " N=" << cert.iterations
              << " iters_constant=" << (constant ? "yes" : "no") << " max_dev=" << fmt(max_dev)
              << " first_gap_below_eps: N-1 x" << at_nm1 << ", N x" << at_n;
    if (other > 0) std::cout << ", other x" << other;
    std::cout << "\n";
  }
  std::cout << "total instances=" << count * nmax << " max_dev=" << fmt(global_dev)
            << " all_iteration_counts_certified=" << (all_certified ? "yes" : "no") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certq: box-constrained QP solver with an exact iteration-count certificate"};
  app.require_subcommand(1);

  std::size_t cert_n = 0;
  double cert_eps = 1e-6;
  auto* certify = app.add_subcommand("certify", "print the iteration certificate for (n, eps)");
  certify->add_option("--n", cert_n, "problem dimension")->required();
  certify->add_option("--eps", cert_eps, "stopping accuracy (duality gap)");

  std::string solve_path;
  double solve_eps = 1e-6;
  std::string trace_path;
  auto* solve = app.add_subcommand("solve", "solve a JSON problem file");
  solve->add_option("file", solve_path, "problem file (keys Q, d, l, u)")->required();
  solve->add_option("--eps", solve_eps, "stopping accuracy (duality gap)");
  solve->add_option("--trace", trace_path, "write per-iteration diagnostics CSV here");

  std::size_t demo_T = 5;
  double demo_eps = 1e-6;
  std::string demo_out = "afti16_sim.csv";
  std::size_t demo_steps = 80;
  double demo_amp = 10.0;
  double demo_switch = 2.0;
  auto* demo = app.add_subcommand("demo-afti16", "closed-loop AFTI-16 pitch tracking demo");
  demo->add_option("--T", demo_T, "prediction horizon (1..50)")->required();
  demo->add_option("--eps", demo_eps, "stopping accuracy");
  demo->add_option("--out", demo_out, "SimLog CSV output path");
  demo->add_option("--steps", demo_steps, "simulation length in samples");
  demo->add_option("--amp", demo_amp, "pitch reference amplitude [deg]");
  demo->add_option("--t-switch", demo_switch, "time the reference drops to zero [s]");

  std::size_t bench_count = 10;
  std::size_t bench_nmax = 8;
  double bench_eps = 1e-6;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "randomized IPM-vs-oracle verification report");
  bench->add_option("--count", bench_count, "instances per dimension");
  bench->add_option("--nmax", bench_nmax, "largest dimension (<= 12)");
  bench->add_option("--eps", bench_eps, "stopping accuracy");
  bench->add_option("--seed", bench_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*certify) return cmd_certify(cert_n, cert_eps);
    if (*solve) return cmd_solve(solve_path, solve_eps, trace_path);
    if (*demo) {
      if (demo_T < 1 || demo_T > 50) {
        std::cerr << "demo-afti16: --T must lie in 1..50\n";
        return kExitUsage;
      }
      if (demo_steps < 1) {
        std::cerr << "demo-afti16: --steps must be >= 1\n";
        return kExitUsage;
      }
      return cmd_demo_afti16(demo_T, demo_eps, demo_out, demo_steps, demo_amp, demo_switch);
    }
    if (*bench) {
      if (bench_nmax < 1 || bench_nmax > 12 || bench_count < 1) {
        std::cerr << "bench: need --count >= 1 and 1 <= --nmax <= 12\n";
        return kExitUsage;
      }
      return cmd_bench(bench_count, bench_nmax, bench_eps, bench_seed);
    }
  } catch (const certq::NumericalBreakdown& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const certq::IterationLimit& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const certq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
