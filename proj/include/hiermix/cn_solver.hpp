#pragma once

#include "hiermix/assembly.hpp"
#include "hiermix/stencil.hpp"

#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <vector>

namespace hiermix {

struct SolverOptions {
  double tol = 1e-10;  // inner CG tolerance (relative to min(1, ||b||))
  int max_cg_iters = 0;  // 0 picks 10 * N_L
};

struct CgResult {
  int iters = 0;
  double residual = 0;
};

/// Preconditioner-free conjugate gradients for a symmetric positive definite
/// operator given as a matvec.  x holds the initial guess on entry.  Stops at
/// ||r||_2 <= tol * min(1, ||b||_2); throws SolverError on breakdown or when
/// the iteration budget is exhausted.
CgResult conjugate_gradient(
    const std::function<void(const Vector&, Vector&)>& apply, const Vector& b,
    Vector& x, double tol, int max_iters);

struct TimeGrid {
  double t0 = 0;
  double tf = 1;
  int steps = 1;
  double tau() const { return (tf - t0) / steps; }
  double at(int n) const { return t0 + n * tau(); }
};

struct StepStats {
  double t = 0;  // time reached by the step
  int cg_iters = 0;
  double cg_residual = 0;
  double constraint_residual = 0;  // ||C' U + Ghn||_2 after the step
};

/// Crank-Nicolson integrator for the reduced differential-algebraic system
///   D dP/dt + M P + Q Lambda = S(t),   Q' P + N Lambda = T(t).
/// Each step factors into three phases: a predictor solve with the block
/// diagonal operator D + (tau/2) M, a CG solve on the multiplier complement
/// N - (tau/2) Q' (D + (tau/2) M)^{-1} Q, and a corrector solve that folds the
/// new multiplier back into the pressure.  The algebraic constraint is then
/// satisfied up to the CG residual at every step.  Block operations never
/// couple subdomains and run in parallel over them.
class CnSolver {
 public:
  struct State {
    double t = 0;
    Vector P;       // N_W
    Vector Lambda;  // N_L
    Vector U;       // N_V, recovered flux
  };

  CnSolver(const HierMesh& mesh, const SystemMatrices& sys,
           const SchurBlocks& blocks, const RhsAssembler& rhs,
           SolverOptions opt = {}, const StencilEngine* stencil = nullptr);

  /// Multiplier solving the constraint N Lambda = T(t) - Q' P for a given
  /// pressure (used for the consistent initial condition).
  Vector consistent_lambda(const Vector& P, double t) const;

  /// Builds the consistent initial state at time t0 from element-averaged
  /// initial pressure values.
  State make_initial(const Vector& P0, double t0) const;

  /// Factorizes D + (tau/2) M; required before step().
  void prepare(double tau);

  /// Advances st by the prepared step size.
  StepStats step(State& st);

  using Observer = std::function<void(const State&, const StepStats&)>;

  /// Runs grid.steps steps from st.t (= grid.t0); the observer, if set, sees
  /// every accepted state.
  std::vector<StepStats> integrate(State& st, const TimeGrid& grid,
                                   const Observer& observer = {});

 private:
  void block_solve(Vector& x) const;  // x := (D + (tau/2) M)^{-1} x
  void apply_m(const Vector& x, Vector& y) const;
  void apply_complement(const Vector& x, Vector& y) const;
  int cg_budget() const;

  const HierMesh& mesh_;
  const SystemMatrices& sys_;
  const SchurBlocks& blocks_;
  const RhsAssembler& rhs_;
  SolverOptions opt_;
  const StencilEngine* stencil_;

  double tau_ = 0;
  std::vector<std::unique_ptr<Eigen::SimplicialLDLT<SpMatCol>>> factor_;
  bool have_cache_ = false;
  double cache_t_ = 0;
  Vector cache_S_;
};

}  // namespace hiermix
