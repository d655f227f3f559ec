#pragma once

#include "hiermix/assembly.hpp"
#include "hiermix/coarse_mesh.hpp"
#include "hiermix/permeability.hpp"
#include "hiermix/postproc.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hiermix {

/// A complete problem instance: geometry, material data, boundary and initial
/// data, and (when known) the exact solution for error evaluation.  Value
/// object; safe to share across threads.
struct ProblemSpec {
  std::string name;
  CoarseMesh coarse;
  PermeabilityField K;
  ScalarFn source;     // f(x, y, t)
  ScalarFn dirichlet;  // g_D on Dirichlet edges
  ScalarFn neumann;    // g_N on Neumann edges
  std::function<double(double, double)> p0;
  double t_final = 1.0;
  double default_tau = 0.1;
  std::optional<ExactSolution> exact;
};

std::vector<std::string> builtin_problem_names();

/// smooth7gon, mackinnon-carey, lowperm or holes; throws ValidationError on
/// an unknown name.
ProblemSpec builtin_problem(const std::string& name);

/// Custom problem from a mesh file plus a flat key = value data file.
/// Recognized keys: k (uniform scalar), tensor (kxx kxy kyy), k.<i>
/// (per-subdomain scalar), p0, f, gd, gn (one value for a constant or three
/// for a0 + ax*x + ay*y), tf, tau.
ProblemSpec load_problem(const std::string& mesh_path, const std::string& data_path);

}  // namespace hiermix
