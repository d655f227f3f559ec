#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hiermix/run.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

using namespace hiermix;

namespace {

std::mt19937 rng(0xc4);

Eigen::MatrixXd random_spd_matrix(int n) {
  std::uniform_real_distribution<double> d(-1, 1);
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = d(rng);
  return R * R.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

ProblemSpec constant_square_problem(double c, BoundaryKind right) {
  ProblemSpec p;
  p.name = "constant";
  p.coarse = CoarseMesh::build({{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                               {{0, 1, 2}, {0, 2, 3}},
                               {{0, 1, BoundaryKind::Dirichlet},
                                {1, 2, right},
                                {2, 3, BoundaryKind::Dirichlet},
                                {3, 0, BoundaryKind::Dirichlet}});
  p.K = PermeabilityField::uniform((Mat2() << 2, 0.5, 0.5, 1).finished());
  p.source = [](double, double, double) { return 0.0; };
  p.dirichlet = [=](double, double, double) { return c; };
  p.neumann = [](double, double, double) { return 0.0; };
  p.p0 = [=](double, double) { return c; };
  p.t_final = 1.5;
  p.default_tau = 0.5;
  return p;
}

}  // namespace

TEST_CASE("conjugate gradients against a dense factorization") {
  const int n = 40;
  const Eigen::MatrixXd A = random_spd_matrix(n);
  std::uniform_real_distribution<double> d(-1, 1);
  Vector b(n);
  for (int i = 0; i < n; ++i) b[i] = d(rng);

  auto apply = [&](const Vector& x, Vector& y) { y = A * x; };
  Vector x = Vector::Zero(n);
  const CgResult res = conjugate_gradient(apply, b, x, 1e-12, 10 * n);
  CHECK(res.iters > 0);
  CHECK(res.residual <= 1e-12 * std::min(1.0, b.norm()));

  const Vector x_direct = A.ldlt().solve(b);
  CHECK((x - x_direct).norm() <= 1e-9 * x_direct.norm());

  // warm start at the solution terminates without iterating
  Vector warm = x_direct;
  const CgResult res2 = conjugate_gradient(apply, b, warm, 1e-8, 10 * n);
  CHECK(res2.iters == 0);

  // iteration budget
  Vector y = Vector::Zero(n);
  CHECK_THROWS_AS(conjugate_gradient(apply, b, y, 1e-14, 2), SolverError);

  // an indefinite operator is rejected
  Eigen::MatrixXd Ind = A;
  Ind(0, 0) = -2.0 * n;
  Vector z = Vector::Zero(n);
  CHECK_THROWS_AS(conjugate_gradient(
                      [&](const Vector& v, Vector& w) { w = Ind * v; }, b, z,
                      1e-12, 10 * n),
                  SolverError);
}

TEST_CASE("a constant state is a fixed point of the time step") {
  const double c = 2.75;
  for (BoundaryKind right : {BoundaryKind::Dirichlet, BoundaryKind::Neumann}) {
    const ProblemSpec prob = constant_square_problem(c, right);
    for (double tau : {1.0, 0.1}) {
      RunOptions opt;
      opt.level = 2;
      opt.tau = tau;
      const RunSummary sum = run_problem(prob, opt);
      CHECK((sum.final_state.P.array() - c).abs().maxCoeff() < 1e-10);
      if (sum.final_state.Lambda.size() > 0)
        CHECK((sum.final_state.Lambda.array() - c).abs().maxCoeff() < 1e-10);
      CHECK(sum.final_state.U.lpNorm<Eigen::Infinity>() < 1e-9);
      CHECK(sum.max_constraint_residual < 1e-9);
    }
  }
}

TEST_CASE("consistent initial state") {
  const double c = -1.5;
  const ProblemSpec prob = constant_square_problem(c, BoundaryKind::Neumann);
  Discretization disc(prob, 2);
  CnSolver solver = disc.make_solver();
  const Vector P0 = initial_pressure(
      disc.mesh, [&](double x, double y) { return prob.p0(x, y); });
  const CnSolver::State st = solver.make_initial(P0, 0.0);
  CHECK(st.t == 0.0);
  CHECK((st.Lambda.array() - c).abs().maxCoeff() < 1e-10);
  CHECK(st.U.lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("one step satisfies the averaged update identity") {
  const ProblemSpec prob = builtin_problem("smooth7gon");
  Discretization disc(prob, 2);
  SolverOptions opt;
  opt.tol = 1e-12;
  CnSolver solver = disc.make_solver(opt);

  const Vector P0 = initial_pressure(
      disc.mesh, [&](double x, double y) { return prob.p0(x, y); });
  CnSolver::State st = solver.make_initial(P0, 0.0);
  const Vector P_old = st.P, L_old = st.Lambda;

  const double tau = 0.05;
  solver.prepare(tau);
  solver.step(st);

  const RhsAssembler::Sample s0 = disc.rhs->at(0.0);
  const RhsAssembler::Sample s1 = disc.rhs->at(tau);
  const Vector lhs =
      disc.sys.area.cwiseProduct((st.P - P_old) / tau) +
      disc.blocks.M * (0.5 * (st.P + P_old)) +
      disc.blocks.Q * (0.5 * (st.Lambda + L_old));
  const Vector rhs_avg = 0.5 * (s0.S + s1.S);
  const double scale = rhs_avg.norm() + lhs.norm();
  CHECK((lhs - rhs_avg).norm() <= 1e-9 * scale);
}

TEST_CASE("per-step constraint residual stays within the inner tolerance") {
  for (const char* name : {"mackinnon-carey", "holes"}) {
    const ProblemSpec prob = builtin_problem(name);
    RunOptions opt;
    opt.level = 2;
    opt.tau = 0.25;
    opt.t_final = 1.0;
    opt.tol = 1e-10;
    std::vector<double> residuals;
    const RunSummary sum = run_problem(
        prob, opt, [&](const CnSolver::State&, const StepStats& stats) {
          residuals.push_back(stats.constraint_residual);
        });
    REQUIRE(!residuals.empty());
    for (double r : residuals) CHECK(r <= 10.0 * opt.tol);
    CHECK(sum.max_constraint_residual <= 10.0 * opt.tol);
  }
}

TEST_CASE("time stepping converges at second order") {
  // same-mesh comparison against a fine-step reference; the spatial error
  // cancels and only the time discretization remains.  The final time must
  // not be an extremum of the time profile or the leading error term
  // degenerates.
  const ProblemSpec prob = builtin_problem("smooth7gon");
  auto final_pressure = [&](double tau) {
    RunOptions opt;
    opt.level = 2;
    opt.tau = tau;
    opt.t_final = 0.7;
    return run_problem(prob, opt).final_state.P;
  };
  const Vector ref = final_pressure(0.7 / 448.0);
  const double e1 = (final_pressure(0.1) - ref).norm();
  const double e2 = (final_pressure(0.05) - ref).norm();
  const double e3 = (final_pressure(0.025) - ref).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.3));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("solver guard rails") {
  const ProblemSpec prob = constant_square_problem(1.0, BoundaryKind::Dirichlet);
  Discretization disc(prob, 1);
  CnSolver solver = disc.make_solver();
  CnSolver::State st = solver.make_initial(
      initial_pressure(disc.mesh, [](double, double) { return 1.0; }), 0.0);
  CHECK_THROWS_AS(solver.step(st), SolverError);
  CHECK_THROWS_AS(solver.prepare(0.0), ValidationError);

  // an absurdly small CG budget trips the failure path
  const ProblemSpec hard = builtin_problem("smooth7gon");
  Discretization hd(hard, 2);
  SolverOptions opt;
  opt.max_cg_iters = 1;
  opt.tol = 1e-14;
  CnSolver hs = hd.make_solver(opt);
  const Vector P_ramp = Vector::LinSpaced(hd.mesh.num_elements(), -1.0, 1.0);
  CHECK_THROWS_AS(hs.make_initial(P_ramp, 0.0), SolverError);
}

TEST_CASE("time grid resolution") {
  const ProblemSpec prob = constant_square_problem(1.0, BoundaryKind::Dirichlet);
  RunOptions opt;
  opt.tau = 0.1;
  opt.t_final = 0.35;
  TimeGrid g = resolve_time_grid(prob, opt);
  CHECK(g.steps == 4);
  CHECK(g.tau() == doctest::Approx(0.0875).epsilon(1e-12));
  CHECK(g.at(g.steps) == doctest::Approx(0.35).epsilon(1e-12));

  opt.tau = 0;
  opt.t_final = 0;
  g = resolve_time_grid(prob, opt);
  CHECK(g.tf == doctest::Approx(prob.t_final).epsilon(1e-12));
  CHECK(g.tau() == doctest::Approx(prob.default_tau).epsilon(1e-12));

  opt.steps = 7;
  g = resolve_time_grid(prob, opt);
  CHECK(g.steps == 7);
}
