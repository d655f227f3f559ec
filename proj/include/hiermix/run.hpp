#pragma once

#include "hiermix/cn_solver.hpp"
#include "hiermix/postproc.hpp"
#include "hiermix/problems.hpp"
#include "hiermix/stencil.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace hiermix {

/// Everything derived from (problem, level): mesh, operators, Schur blocks,
/// stencils and the flux reconstruction.  Not movable; components hold
/// references into each other.
class Discretization {
 public:
  Discretization(const ProblemSpec& problem, int level, bool with_stencil = true);
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  HierMesh mesh;
  SystemMatrices sys;
  SchurBlocks blocks;
  std::unique_ptr<StencilEngine> stencil;  // null when disabled
  std::unique_ptr<RhsAssembler> rhs;
  std::unique_ptr<FluxPostprocessor> post;

  CnSolver make_solver(const SolverOptions& opt = {}) const;
};

struct RunOptions {
  int level = 3;
  double tau = 0;      // <= 0 picks the problem default
  int steps = 0;       // > 0 overrides tau by splitting [0, t_final] evenly
  double t_final = 0;  // <= 0 picks the problem default
  double tol = 1e-10;
  bool use_stencil = true;
};

/// Resolves tau/steps/t_final against the problem defaults.  The number of
/// steps is rounded up so the grid covers [0, t_final] with step <= tau.
TimeGrid resolve_time_grid(const ProblemSpec& problem, const RunOptions& opt);

struct RunSummary {
  DofCounts counts;
  TimeGrid grid;
  int cg_total = 0;
  int cg_max = 0;
  double max_constraint_residual = 0;
  double wall_seconds = 0;
  CnSolver::State final_state;
  std::optional<ErrorNorms> errors;  // set when the problem has an exact solution
};

RunSummary run_problem(const ProblemSpec& problem, const RunOptions& opt,
                       const CnSolver::Observer& observer = {});

struct ConvergenceRow {
  int level = 0;
  int n_pressure = 0;
  ErrorNorms errors;
};

/// One run per level with a shared time grid; problems without an exact
/// solution are rejected.
std::vector<ConvergenceRow> convergence_study(const ProblemSpec& problem,
                                              const std::vector<int>& levels,
                                              RunOptions opt);

/// Rows of level, cell count, the four norms and the observed orders between
/// consecutive rows, 5 significant digits.
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

/// Mean of the observed orders between consecutive levels for each norm:
/// {p_l2, p_max, post_l2, flux_l2}.
std::array<double, 4> average_orders(const std::vector<ConvergenceRow>& rows);

}  // namespace hiermix
