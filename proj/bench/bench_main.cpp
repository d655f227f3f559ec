// Timing comparison of the serial reference paths against the OpenMP ones:
// the stencil matvec (vs. the assembled CSR product) and full time steps at
// different thread caps.  Also verifies that thread count does not change
// results.

#include "hiermix/parallel.hpp"
#include "hiermix/problems.hpp"
#include "hiermix/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

using namespace hiermix;

namespace {

double time_of(int reps, const std::function<void()>& fn) {
  fn();  // warm up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  int level = 5;
  int reps = 20;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--level") && i + 1 < argc)
      level = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--reps") && i + 1 < argc)
      reps = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--level L] [--reps N]\n", argv[0]);
      return 1;
    }
  }

  const ProblemSpec problem = builtin_problem("smooth7gon");
  Discretization disc(problem, level, true);
  const int nw = disc.mesh.num_elements();
  std::printf("smooth7gon, level %d: %d cells, %d subdomains, OpenMP %s, "
              "%d threads available\n\n",
              level, nw, disc.mesh.num_subdomains(),
              openmp_enabled() ? "on" : "off", num_threads());

  Vector x(nw);
  for (int e = 0; e < nw; ++e) x[e] = std::sin(1.0 + e);
  Vector y_csr(nw), y_serial(nw), y_par(nw);

  const double t_csr = time_of(reps, [&] { y_csr = disc.blocks.M * x; });
  const double t_serial =
      time_of(reps, [&] { disc.stencil->apply_serial(x, y_serial); });
  set_num_threads(0);
  const double t_par = time_of(reps, [&] { disc.stencil->apply(x, y_par); });

  const double diff_sp = (y_serial - y_par).cwiseAbs().maxCoeff();
  const double diff_sc = (y_serial - y_csr).cwiseAbs().maxCoeff();
  std::printf("M matvec (avg of %d reps):\n", reps);
  std::printf("  assembled CSR:     %10.3e s\n", t_csr);
  std::printf("  stencil, serial:   %10.3e s\n", t_serial);
  std::printf("  stencil, OpenMP:   %10.3e s   (speedup vs serial %.2fx)\n", t_par,
              t_serial / t_par);
  std::printf("  serial vs OpenMP max |diff|: %.3e (expect 0)\n", diff_sp);
  std::printf("  stencil vs CSR max |diff|:   %.3e (rounding only)\n\n", diff_sc);

  auto step_time = [&](int threads) {
    set_num_threads(threads);
    SolverOptions sopt;
    CnSolver solver = disc.make_solver(sopt);
    CnSolver::State st =
        solver.make_initial(initial_pressure(disc.mesh, problem.p0), 0.0);
    solver.prepare(problem.default_tau);
    return time_of(std::max(1, reps / 4), [&] {
      CnSolver::State s = st;
      solver.step(s);
    });
  };

  const double t1 = step_time(1);
  const double tn = step_time(0);
  std::printf("full Crank-Nicolson step:\n");
  std::printf("  1 thread:          %10.3e s\n", t1);
  std::printf("  all threads:       %10.3e s   (speedup %.2fx)\n", tn, t1 / tn);
  set_num_threads(0);
  return 0;
}
