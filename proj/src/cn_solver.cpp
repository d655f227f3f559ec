#include "hiermix/cn_solver.hpp"

#include "hiermix/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace hiermix {

CgResult conjugate_gradient(
    const std::function<void(const Vector&, Vector&)>& apply, const Vector& b,
    Vector& x, double tol, int max_iters) {
  const double target = tol * std::min(1.0, b.norm());
  Vector r(b.size()), Ap(b.size());
  apply(x, r);
  r = b - r;
  CgResult res;
  res.residual = r.norm();
  if (res.residual <= target) return res;

  Vector p = r;
  double rr = r.squaredNorm();
  for (int it = 1; it <= max_iters; ++it) {
    apply(p, Ap);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0))
      throw SolverError("conjugate gradients: operator is not positive definite");
    const double alpha = rr / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    res.iters = it;
    res.residual = std::sqrt(rr_new);
    if (res.residual <= target) return res;
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  throw SolverError("conjugate gradients: no convergence in " +
                    std::to_string(max_iters) + " iterations (residual " +
                    std::to_string(res.residual) + ")");
}

CnSolver::CnSolver(const HierMesh& mesh, const SystemMatrices& sys,
                   const SchurBlocks& blocks, const RhsAssembler& rhs,
                   SolverOptions opt, const StencilEngine* stencil)
    : mesh_(mesh),
      sys_(sys),
      blocks_(blocks),
      rhs_(rhs),
      opt_(opt),
      stencil_(stencil) {}

int CnSolver::cg_budget() const {
  const int nl = mesh_.dof_counts().n_multiplier;
  return opt_.max_cg_iters > 0 ? opt_.max_cg_iters : std::max(10, 10 * nl);
}

Vector CnSolver::consistent_lambda(const Vector& P, double t) const {
  const int nl = mesh_.dof_counts().n_multiplier;
  if (nl == 0) return Vector();
  const Vector b = rhs_.Ghn(t) - blocks_.CtE * rhs_.Ghd(t) -
                   blocks_.Q.transpose() * P;
  Vector lambda = Vector::Zero(nl);
  conjugate_gradient(
      [this](const Vector& x, Vector& y) { y = blocks_.N * x; }, b, lambda,
      opt_.tol, cg_budget());
  return lambda;
}

CnSolver::State CnSolver::make_initial(const Vector& P0, double t0) const {
  State st;
  st.t = t0;
  st.P = P0;
  st.Lambda = consistent_lambda(P0, t0);
  st.U = recover_flux(sys_, rhs_.Ghd(t0), st.P, st.Lambda);
  return st;
}

void CnSolver::prepare(double tau) {
  if (!(tau > 0)) throw ValidationError("step size must be positive");
  tau_ = tau;
  const int ns = mesh_.num_subdomains();
  factor_.clear();
  factor_.resize(ns);
#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (int k = 0; k < ns; ++k) {
    const SubdomainGrid& g = mesh_.subdomain(k);
    SpMatCol F = SpMatCol(blocks_.M_block[k] * (0.5 * tau));
    for (int i = 0; i < g.n_elems; ++i)
      F.coeffRef(i, i) += mesh_.element_area(g.elem_offset + i);
    auto solver = std::make_unique<Eigen::SimplicialLDLT<SpMatCol>>();
    solver->compute(F);
    if (solver->info() != Eigen::Success)
      throw SolverError("block factorization failed");
    factor_[k] = std::move(solver);
  }
  have_cache_ = false;
}

void CnSolver::block_solve(Vector& x) const {
  const int ns = mesh_.num_subdomains();
#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (int k = 0; k < ns; ++k) {
    const SubdomainGrid& g = mesh_.subdomain(k);
    x.segment(g.elem_offset, g.n_elems) =
        factor_[k]->solve(x.segment(g.elem_offset, g.n_elems));
  }
}

void CnSolver::apply_m(const Vector& x, Vector& y) const {
  if (stencil_) {
    stencil_->apply(x, y);
  } else {
    y = blocks_.M * x;
  }
}

void CnSolver::apply_complement(const Vector& x, Vector& y) const {
  Vector w = blocks_.Q * x;
  block_solve(w);
  y = blocks_.N * x - (0.5 * tau_) * (blocks_.Q.transpose() * w);
}

StepStats CnSolver::step(State& st) {
  if (factor_.empty()) throw SolverError("prepare() must be called before step()");
  const double t_next = st.t + tau_;
  const int nl = mesh_.dof_counts().n_multiplier;

  if (!have_cache_ || cache_t_ != st.t) {
    cache_S_ = rhs_.at(st.t).S;
  }
  const RhsAssembler::Sample next = rhs_.at(t_next);

  // Phase 1: predictor pressure from the decoupled parabolic part.
  Vector mp(st.P.size());
  apply_m(st.P, mp);
  Vector z = 0.5 * tau_ * (cache_S_ + next.S) - 0.5 * tau_ * mp;
  if (nl > 0) z -= 0.5 * tau_ * (blocks_.Q * st.Lambda);
  for (int e = 0; e < z.size(); ++e) z[e] += mesh_.element_area(e) * st.P[e];
  block_solve(z);

  StepStats stats;
  stats.t = t_next;

  // Phase 2: multiplier from the interface complement system.
  Vector lambda = st.Lambda;
  if (nl > 0) {
    const Vector b = next.T - blocks_.Q.transpose() * z;
    const CgResult cg = conjugate_gradient(
        [this](const Vector& x, Vector& y) { apply_complement(x, y); }, b,
        lambda, opt_.tol, cg_budget());
    stats.cg_iters = cg.iters;
    stats.cg_residual = cg.residual;
  }

  // Phase 3: corrector folds the multiplier update into the pressure.
  if (nl > 0) {
    Vector delta = 0.5 * tau_ * (blocks_.Q * lambda);
    block_solve(delta);
    z -= delta;
  }

  st.t = t_next;
  st.P = std::move(z);
  st.Lambda = std::move(lambda);
  st.U = recover_flux(sys_, rhs_.Ghd(t_next), st.P, st.Lambda);

  Vector cres = sys_.C.transpose() * st.U + rhs_.Ghn(t_next);
  stats.constraint_residual = cres.size() > 0 ? cres.norm() : 0.0;

  cache_S_ = next.S;
  cache_t_ = t_next;
  have_cache_ = true;
  return stats;
}

std::vector<StepStats> CnSolver::integrate(State& st, const TimeGrid& grid,
                                           const Observer& observer) {
  prepare(grid.tau());
  std::vector<StepStats> all;
  all.reserve(grid.steps);
  for (int n = 1; n <= grid.steps; ++n) {
    StepStats s = step(st);
    // guard against drift in t from repeated addition
    st.t = grid.at(n);
    all.push_back(s);
    if (observer) observer(st, s);
  }
  return all;
}

}  // namespace hiermix
