#include "hiermix/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace hiermix {

Discretization::Discretization(const ProblemSpec& problem, int level,
                               bool with_stencil)
    : mesh(HierMesh::refine(problem.coarse, level)),
      sys(assemble_system(mesh, problem.K)),
      blocks(schur_blocks(mesh, sys)) {
  if (with_stencil) stencil = std::make_unique<StencilEngine>(mesh, problem.K, blocks.M);
  rhs = std::make_unique<RhsAssembler>(mesh, blocks, problem.source,
                                       problem.dirichlet, problem.neumann);
  post = std::make_unique<FluxPostprocessor>(mesh);
}

CnSolver Discretization::make_solver(const SolverOptions& opt) const {
  return CnSolver(mesh, sys, blocks, *rhs, opt, stencil.get());
}

TimeGrid resolve_time_grid(const ProblemSpec& problem, const RunOptions& opt) {
  TimeGrid grid;
  grid.t0 = 0;
  grid.tf = opt.t_final > 0 ? opt.t_final : problem.t_final;
  if (opt.steps > 0) {
    grid.steps = opt.steps;
  } else {
    const double tau = opt.tau > 0 ? opt.tau : problem.default_tau;
    grid.steps = std::max(1, static_cast<int>(std::ceil(grid.tf / tau - 1e-9)));
  }
  return grid;
}

RunSummary run_problem(const ProblemSpec& problem, const RunOptions& opt,
                       const CnSolver::Observer& observer) {
  const auto start = std::chrono::steady_clock::now();

  Discretization disc(problem, opt.level, opt.use_stencil);
  SolverOptions sopt;
  sopt.tol = opt.tol;
  CnSolver solver = disc.make_solver(sopt);

  RunSummary out;
  out.counts = disc.mesh.dof_counts();
  out.grid = resolve_time_grid(problem, opt);

  std::optional<ErrorAccumulator> acc;
  if (problem.exact)
    acc.emplace(disc.mesh, *problem.exact, disc.post.get());

  CnSolver::State st = solver.make_initial(initial_pressure(disc.mesh, problem.p0),
                                           out.grid.t0);
  const auto stats = solver.integrate(
      st, out.grid, [&](const CnSolver::State& s, const StepStats& ss) {
        if (acc) acc->observe(s);
        if (observer) observer(s, ss);
      });

  for (const StepStats& s : stats) {
    out.cg_total += s.cg_iters;
    out.cg_max = std::max(out.cg_max, s.cg_iters);
    out.max_constraint_residual =
        std::max(out.max_constraint_residual, s.constraint_residual);
  }
  out.final_state = std::move(st);
  if (acc) out.errors = acc->norms();
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<ConvergenceRow> convergence_study(const ProblemSpec& problem,
                                              const std::vector<int>& levels,
                                              RunOptions opt) {
  if (!problem.exact)
    throw ValidationError("problem '" + problem.name +
                          "' has no exact solution; convergence study unavailable");
  std::vector<ConvergenceRow> rows;
  for (int level : levels) {
    opt.level = level;
    const RunSummary s = run_problem(problem, opt);
    ConvergenceRow row;
    row.level = level;
    row.n_pressure = s.counts.n_pressure;
    row.errors = *s.errors;
    rows.push_back(row);
  }
  return rows;
}

void write_convergence_csv(std::ostream& out,
                           const std::vector<ConvergenceRow>& rows) {
  out << "level,cells,p_l2,p_l2_order,p_max,p_max_order,flux_l2,flux_l2_order,"
         "post_l2,post_l2_order\n";
  out.precision(4);
  out.setf(std::ios::scientific);
  auto cell = [&out](double v, bool order) {
    out << ',';
    if (std::isnan(v)) return;
    if (order) {
      out.unsetf(std::ios::scientific);
      out.precision(3);
      out << v;
      out.setf(std::ios::scientific);
      out.precision(4);
    } else {
      out << v;
    }
  };
  for (size_t r = 0; r < rows.size(); ++r) {
    const ErrorNorms& e = rows[r].errors;
    const ErrorNorms* prev = r > 0 ? &rows[r - 1].errors : nullptr;
    const double nan = std::nan("");
    out << rows[r].level << ',' << rows[r].n_pressure;
    cell(e.p_l2, false);
    cell(prev ? observed_order(prev->p_l2, e.p_l2) : nan, true);
    cell(e.p_max, false);
    cell(prev ? observed_order(prev->p_max, e.p_max) : nan, true);
    cell(e.flux_l2, false);
    cell(prev ? observed_order(prev->flux_l2, e.flux_l2) : nan, true);
    cell(e.post_l2, false);
    cell(prev ? observed_order(prev->post_l2, e.post_l2) : nan, true);
    out << '\n';
  }
}

std::array<double, 4> average_orders(const std::vector<ConvergenceRow>& rows) {
  std::array<double, 4> sum = {0, 0, 0, 0};
  const int n = static_cast<int>(rows.size()) - 1;
  if (n <= 0) return {0, 0, 0, 0};
  for (size_t r = 1; r < rows.size(); ++r) {
    const ErrorNorms& a = rows[r - 1].errors;
    const ErrorNorms& b = rows[r].errors;
    sum[0] += observed_order(a.p_l2, b.p_l2);
    sum[1] += observed_order(a.p_max, b.p_max);
    sum[2] += observed_order(a.post_l2, b.post_l2);
    sum[3] += observed_order(a.flux_l2, b.flux_l2);
  }
  for (double& v : sum) v /= n;
  return sum;
}

}  // namespace hiermix
