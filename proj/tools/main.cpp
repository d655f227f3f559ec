#include "hiermix/field_io.hpp"
#include "hiermix/parallel.hpp"
#include "hiermix/problems.hpp"
#include "hiermix/run.hpp"
#include "hiermix/stencil.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace hiermix;

struct CommonArgs {
  std::string problem;
  std::string mesh_file;
  std::string data_file;
  int level = 3;
  double tau = 0;
  int steps = 0;
  double t_final = 0;
  double tol = 1e-10;
  int threads = 0;
  std::string out_dir;
  bool no_stencil = false;
};

void add_problem_flags(CLI::App* cmd, CommonArgs& a) {
  auto* prob = cmd->add_option("--problem", a.problem,
                               "built-in problem: smooth7gon, mackinnon-carey, "
                               "lowperm, holes");
  auto* mesh = cmd->add_option("--mesh", a.mesh_file, "coarse mesh file");
  cmd->add_option("--data", a.data_file, "problem data file (key = value)")
      ->needs(mesh);
  mesh->excludes(prob);
  cmd->add_option("--level", a.level, "refinement level")
      ->check(CLI::Range(0, 14));
  cmd->add_option("--threads", a.threads, "subdomain-level thread cap (0 = all)")
      ->check(CLI::NonNegativeNumber);
}

void add_time_flags(CLI::App* cmd, CommonArgs& a) {
  auto* tau = cmd->add_option("--tau", a.tau, "time step");
  cmd->add_option("--steps", a.steps, "number of steps (alternative to --tau)")
      ->excludes(tau);
  cmd->add_option("--tf", a.t_final, "final time override");
  cmd->add_option("--tol", a.tol, "inner solver tolerance")
      ->check(CLI::Range(1e-16, 1.0));
  cmd->add_flag("--no-stencil", a.no_stencil,
                "use assembled rows instead of stencils");
}

ProblemSpec resolve_problem(const CommonArgs& a) {
  if (!a.mesh_file.empty()) {
    if (a.data_file.empty())
      throw ValidationError("--mesh requires --data");
    return load_problem(a.mesh_file, a.data_file);
  }
  if (a.problem.empty())
    throw ValidationError("one of --problem or --mesh/--data is required");
  return builtin_problem(a.problem);
}

RunOptions make_run_options(const CommonArgs& a) {
  RunOptions opt;
  opt.level = a.level;
  opt.tau = a.tau;
  opt.steps = a.steps;
  opt.t_final = a.t_final;
  opt.tol = a.tol;
  opt.use_stencil = !a.no_stencil;
  return opt;
}

void print_counts(std::ostream& os, const DofCounts& c) {
  os << "cells (N_W):        " << c.n_pressure << "\n"
     << "velocity dofs (N_V):" << ' ' << c.n_velocity << "\n"
     << "gradient dofs:      " << c.n_gradient << "\n"
     << "multipliers (N_L):  " << c.n_multiplier << "\n"
     << "distinct edges:     " << c.n_edges << "\n"
     << "  interface:        " << c.n_gamma - c.n_neumann << "\n"
     << "  Dirichlet:        " << c.n_dirichlet << "\n"
     << "  Neumann:          " << c.n_neumann << "\n";
}

int cmd_solve(const CommonArgs& a, const std::string& write_fields) {
  const ProblemSpec problem = resolve_problem(a);
  const RunOptions opt = make_run_options(a);

  const bool want_fields = !a.out_dir.empty() && write_fields != "none";
  if (!a.out_dir.empty()) std::filesystem::create_directories(a.out_dir);

  const HierMesh* mesh_ptr = nullptr;
  int step_no = 0;
  CnSolver::Observer observer;
  if (want_fields && write_fields == "all") {
    observer = [&](const CnSolver::State& st, const StepStats&) {
      char name[64];
      std::snprintf(name, sizeof(name), "step_%04d.vtk", ++step_no);
      write_vtk_file(a.out_dir + "/" + name, problem.name, *mesh_ptr, st.P, st.U);
    };
  }

  // run_problem owns the discretization; rebuild here only to expose the mesh
  // to the per-step writer without widening the library interface
  Discretization disc(problem, a.level, !a.no_stencil);
  mesh_ptr = &disc.mesh;
  SolverOptions sopt;
  sopt.tol = a.tol;
  CnSolver solver = disc.make_solver(sopt);
  RunSummary sum;
  sum.counts = disc.mesh.dof_counts();
  sum.grid = resolve_time_grid(problem, opt);
  const auto t_start = std::chrono::steady_clock::now();
  CnSolver::State st =
      solver.make_initial(initial_pressure(disc.mesh, problem.p0), sum.grid.t0);
  const auto stats = solver.integrate(st, sum.grid, observer);
  for (const StepStats& s : stats) {
    sum.cg_total += s.cg_iters;
    sum.cg_max = std::max(sum.cg_max, s.cg_iters);
    sum.max_constraint_residual =
        std::max(sum.max_constraint_residual, s.constraint_residual);
  }
  sum.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  std::ostringstream report;
  report << "problem:            " << problem.name << "\n"
         << "level:              " << a.level << "\n";
  print_counts(report, sum.counts);
  report << "steps:              " << sum.grid.steps << " (tau = " << sum.grid.tau()
         << ")\n"
         << "cg iterations:      " << sum.cg_total << " total, " << sum.cg_max
         << " max per step\n"
         << "constraint residual:" << ' ' << sum.max_constraint_residual << "\n"
         << "wall time:          " << sum.wall_seconds << " s\n";
  std::cout << report.str();

  if (!a.out_dir.empty()) {
    std::ofstream f(a.out_dir + "/summary.txt");
    f << report.str();
    if (want_fields) {
      write_vtk_file(a.out_dir + "/final.vtk", problem.name, disc.mesh, st.P, st.U);
      write_cell_csv_file(a.out_dir + "/final.csv", disc.mesh, st.P, st.U);
    }
  }
  return 0;
}

int cmd_convergence(const CommonArgs& a, std::vector<int> levels,
                    std::vector<double> taus) {
  const ProblemSpec problem = resolve_problem(a);
  if (levels.empty()) levels = {3, 4, 5};
  if (taus.empty()) taus = {a.tau > 0 ? a.tau : problem.default_tau};
  if (!a.out_dir.empty()) std::filesystem::create_directories(a.out_dir);

  for (double tau : taus) {
    CommonArgs at = a;
    at.tau = tau;
    at.steps = 0;
    RunOptions opt = make_run_options(at);
    const auto rows = convergence_study(problem, levels, opt);
    std::ostringstream csv;
    write_convergence_csv(csv, rows);
    if (taus.size() > 1) std::cout << "# tau = " << tau << "\n";
    std::cout << csv.str();
    if (!a.out_dir.empty()) {
      std::ostringstream name;
      name << a.out_dir << "/" << problem.name << "_tau" << tau << ".csv";
      std::ofstream f(name.str());
      f << csv.str();
    }
  }
  return 0;
}

void print_stencil_matrix(const char* label, const double (&s)[3][3]) {
  std::printf("  %s (columns dj = -1, 0, +1; rows di = -1, 0, +1):\n", label);
  for (int di = -1; di <= 1; ++di) {
    std::printf("   ");
    for (int dj = -1; dj <= 1; ++dj) std::printf(" % .15g", s[di + 1][dj + 1]);
    std::printf("\n");
  }
}

int cmd_stencil(const CommonArgs& a, bool validate) {
  const ProblemSpec problem = resolve_problem(a);
  Discretization disc(problem, a.level, true);
  for (int k = 0; k < disc.mesh.num_subdomains(); ++k) {
    if (!disc.stencil->has_stencil(k))
      throw ValidationError("subdomain " + std::to_string(k) +
                            " has non-constant permeability; no stencil exists");
  }
  for (int k = 0; k < disc.mesh.num_subdomains(); ++k) {
    const StencilSet& s = disc.stencil->stencil(k);
    std::printf("subdomain %d\n", k);
    std::printf("  a(m,n):\n");
    for (int m = 0; m < 3; ++m)
      std::printf("    % .15g % .15g % .15g\n", s.a(m, 0), s.a(m, 1), s.a(m, 2));
    print_stencil_matrix("S_uu", s.uu);
    print_stencil_matrix("S_ud", s.ud);
    print_stencil_matrix("S_du", s.du);
    print_stencil_matrix("S_dd", s.dd);
  }
  if (validate) {
    const double worst = validate_stencils(disc.mesh, *disc.stencil, disc.blocks.M);
    std::printf("max relative discrepancy vs assembled rows: %.3e\n", worst);
  }
  return 0;
}

int cmd_mesh_info(const CommonArgs& a) {
  const ProblemSpec problem = resolve_problem(a);
  const HierMesh mesh = HierMesh::refine(problem.coarse, a.level);
  const DofCounts c = mesh.dof_counts();
  std::cout << "problem:            " << problem.name << "\n"
            << "subdomains:         " << mesh.num_subdomains() << "\n"
            << "level:              " << a.level << " (n = " << (1 << a.level)
            << " per coarse side)\n";
  print_counts(std::cout, c);
  std::cout << "cells/subdomain:    " << c.n_pressure / mesh.num_subdomains()
            << "\n"
            << "coarse diameter:    " << problem.coarse.diameter() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed finite element solver for parabolic Darcy flow on "
               "hierarchical triangular grids"};
  app.require_subcommand(1);

  CommonArgs a;
  std::string write_fields = "final";
  std::vector<int> levels;
  std::vector<double> taus;
  bool validate = false;

  CLI::App* solve = app.add_subcommand("solve", "run one time integration");
  add_problem_flags(solve, a);
  add_time_flags(solve, a);
  solve->add_option("--out", a.out_dir, "output directory");
  solve->add_option("--write-fields", write_fields,
                    "which field snapshots to write")
      ->check(CLI::IsMember({"final", "all", "none"}));

  CLI::App* conv = app.add_subcommand("convergence", "error table over levels");
  add_problem_flags(conv, a);
  add_time_flags(conv, a);
  conv->add_option("--levels", levels, "refinement levels")->delimiter(',');
  conv->add_option("--taus", taus, "time steps (one table each)")->delimiter(',');
  conv->add_option("--out", a.out_dir, "output directory for CSV files");

  CLI::App* sten = app.add_subcommand("stencil", "print per-subdomain stencils");
  add_problem_flags(sten, a);
  sten->add_flag("--validate", validate, "compare against assembled rows");

  CLI::App* info = app.add_subcommand("mesh-info", "print mesh and dof counts");
  add_problem_flags(info, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    set_num_threads(a.threads);
    if (solve->parsed()) return cmd_solve(a, write_fields);
    if (conv->parsed()) return cmd_convergence(a, levels, taus);
    if (sten->parsed()) return cmd_stencil(a, validate);
    if (info->parsed()) return cmd_mesh_info(a);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
