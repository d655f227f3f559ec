#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hiermix/problems.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

using namespace hiermix;

namespace {

std::mt19937 rng(0x9e0b);

// residual of p_t + div u - f and of u + K grad p, by central differences
void check_pde(const ProblemSpec& ps, const Mat2& K, const Vec2& x, double t,
               double tol) {
  REQUIRE(ps.exact.has_value());
  const auto& p = ps.exact->p;
  const auto& u = ps.exact->u;
  const double h = 1e-4;

  const double pt =
      (p(x.x(), x.y(), t + h) - p(x.x(), x.y(), t - h)) / (2 * h);
  const double divu = (u(x.x() + h, x.y(), t).x() - u(x.x() - h, x.y(), t).x() +
                       u(x.x(), x.y() + h, t).y() - u(x.x(), x.y() - h, t).y()) /
                      (2 * h);
  CHECK(std::abs(pt + divu - ps.source(x.x(), x.y(), t)) < tol);

  const Vec2 grad((p(x.x() + h, x.y(), t) - p(x.x() - h, x.y(), t)) / (2 * h),
                  (p(x.x(), x.y() + h, t) - p(x.x(), x.y() - h, t)) / (2 * h));
  CHECK((u(x.x(), x.y(), t) + K * grad).norm() < tol);
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kTestMesh = R"(vertices 4
0 0
1 0
1 1
0 1
triangles 2
0 1 2
0 2 3
boundary 4
0 1 D
1 2 N
2 3 D
3 0 D
)";

}  // namespace

TEST_CASE("builtin catalogue") {
  const auto names = builtin_problem_names();
  REQUIRE(names.size() == 4);
  const int nv[] = {9, 6, 14, 18};
  const int nt[] = {9, 4, 16, 20};
  for (size_t i = 0; i < names.size(); ++i) {
    const ProblemSpec ps = builtin_problem(names[i]);
    CHECK(ps.name == names[i]);
    CHECK(ps.coarse.num_vertices() == nv[i]);
    CHECK(ps.coarse.num_subdomains() == nt[i]);
    CHECK(ps.t_final > 0);
    CHECK(ps.default_tau > 0);
  }
  CHECK_THROWS_AS(builtin_problem("no-such-problem"), ValidationError);
}

TEST_CASE("smooth problem satisfies its own equation") {
  const ProblemSpec ps = builtin_problem("smooth7gon");
  REQUIRE(ps.exact.has_value());
  const Mat2 K = ps.K.at(0, Vec2(1.5, 0.0));
  CHECK(K(0, 0) == 2.0);
  CHECK(K(0, 1) == 1.0);

  std::uniform_real_distribution<double> d01(0.05, 0.9);
  std::uniform_real_distribution<double> dt(0.1, 1.9);
  for (int trial = 0; trial < 100; ++trial) {
    const int tri = trial % ps.coarse.num_subdomains();
    const auto& tv = ps.coarse.triangle(tri);
    double b0 = d01(rng), b1 = d01(rng) * (1 - b0);
    const Vec2 x = ps.coarse.vertex(tv[0]) +
                   b0 * (ps.coarse.vertex(tv[1]) - ps.coarse.vertex(tv[0])) +
                   b1 * (ps.coarse.vertex(tv[2]) - ps.coarse.vertex(tv[0]));
    check_pde(ps, K, x, dt(rng), 1e-5);
  }

  // boundary and initial data coincide with the exact solution
  for (const CoarseEdge& e : ps.coarse.edges()) {
    if (e.tri[1] >= 0) continue;
    CHECK(e.marker == BoundaryKind::Dirichlet);
    const Vec2 mid = 0.5 * (ps.coarse.vertex(e.v0) + ps.coarse.vertex(e.v1));
    for (double t : {0.0, 0.37, 1.8})
      CHECK(std::abs(ps.dirichlet(mid.x(), mid.y(), t) -
                     ps.exact->p(mid.x(), mid.y(), t)) < 1e-14);
    CHECK(std::abs(ps.p0(mid.x(), mid.y()) - ps.exact->p(mid.x(), mid.y(), 0.0)) <
          1e-14);
  }
}

TEST_CASE("piecewise quadratic problem: equation and interface matching") {
  const ProblemSpec ps = builtin_problem("mackinnon-carey");
  REQUIRE(ps.exact.has_value());

  std::uniform_real_distribution<double> dy(0.05, 0.95);
  std::uniform_real_distribution<double> dt(0.2, 2.8);
  for (int trial = 0; trial < 60; ++trial) {
    const bool left = trial % 2 == 0;
    std::uniform_real_distribution<double> dx(left ? 0.02 : 0.55,
                                              left ? 0.45 : 0.98);
    const double x = dx(rng);
    const Mat2 K = ps.K.at(left ? 0 : 2, Vec2(x, 0.5));
    CHECK(K(0, 0) == (left ? 1.0 : 2.0));
    check_pde(ps, K, Vec2(x, dy(rng)), dt(rng), 1e-9);
  }

  // pressure and normal flux are continuous across x = 1/2
  const double eps = 1e-9, t = 1.3;
  for (double y : {0.1, 0.5, 0.9}) {
    CHECK(std::abs(ps.exact->p(0.5 - eps, y, t) - ps.exact->p(0.5 + eps, y, t)) <
          1e-8);
    CHECK(std::abs(ps.exact->u(0.5 - eps, y, t).x() -
                   ps.exact->u(0.5 + eps, y, t).x()) < 1e-8);
    // the common flux value is t^2 (x - 5/12) at x = 1/2
    CHECK(ps.exact->u(0.5, y, t).x() ==
          doctest::Approx(t * t / 12.0).epsilon(1e-12));
  }

  // solution vanishes at t = 0 and on x = 0, x = 1
  CHECK(ps.p0(0.3, 0.3) == 0.0);
  for (double y : {0.2, 0.8}) {
    CHECK(std::abs(ps.exact->p(0.0, y, t)) < 1e-14);
    CHECK(std::abs(ps.exact->p(1.0, y, t)) < 1e-14);
  }
}

TEST_CASE("low permeability regions sit under the right subdomains") {
  const ProblemSpec ps = builtin_problem("lowperm");
  auto in_region = [](const Vec2& c) {
    const bool r1 = c.x() > 0.2 && c.x() < 0.3 && c.y() > 0.0 && c.y() < 0.8;
    const bool r2 = c.x() > 0.6 && c.x() < 0.7 && c.y() > 0.3 && c.y() < 1.0;
    return r1 || r2;
  };
  int low = 0;
  for (int tri = 0; tri < ps.coarse.num_subdomains(); ++tri) {
    const auto& tv = ps.coarse.triangle(tri);
    const Vec2 c = (ps.coarse.vertex(tv[0]) + ps.coarse.vertex(tv[1]) +
                    ps.coarse.vertex(tv[2])) /
                   3.0;
    const Mat2 K = ps.K.at(tri, c);
    if (in_region(c)) {
      ++low;
      CHECK(K(0, 0) == doctest::Approx(1e-6).epsilon(1e-12));
    } else {
      CHECK(K(0, 0) == 1.0);
    }
    CHECK(K(0, 1) == 0.0);
  }
  CHECK(low == 4);

  // pressure held on the two vertical sides, no-flow top and bottom
  int nd = 0, nn = 0;
  for (const CoarseEdge& e : ps.coarse.edges()) {
    if (e.tri[1] >= 0) continue;
    if (e.marker == BoundaryKind::Dirichlet) {
      ++nd;
      const double x0 = ps.coarse.vertex(e.v0).x();
      CHECK(ps.coarse.vertex(e.v1).x() == x0);
      CHECK((x0 == 0.0 || x0 == 1.0));
    } else {
      ++nn;
    }
  }
  CHECK(nd == 2);
  CHECK(nn == 8);
  CHECK(ps.dirichlet(0.0, 0.4, 2.0) == 1.0);
  CHECK(ps.p0(0.25, 0.5) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("perforated domain markers") {
  const ProblemSpec ps = builtin_problem("holes");
  int nd = 0, nn = 0;
  for (const CoarseEdge& e : ps.coarse.edges()) {
    if (e.tri[1] >= 0) continue;
    const Vec2 a = ps.coarse.vertex(e.v0), b = ps.coarse.vertex(e.v1);
    if (e.marker == BoundaryKind::Dirichlet) {
      ++nd;
      CHECK(a.x() == b.x());
      CHECK((a.x() == 0.0 || a.x() == 1.0));
    } else {
      ++nn;
    }
  }
  CHECK(nd == 4);
  CHECK(nn == 14);
  // the holes puncture the domain: more boundary edges than the outer ring
  CHECK(ps.coarse.num_subdomains() == 20);
}

TEST_CASE("permeability validation") {
  Mat2 asym;
  asym << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(PermeabilityField::check_spd(asym), ValidationError);
  Mat2 indef;
  indef << 1, 2, 2, 1;
  CHECK_THROWS_AS(PermeabilityField::check_spd(indef), ValidationError);
  Mat2 negative = -Mat2::Identity();
  CHECK_THROWS_AS(PermeabilityField::check_spd(negative), ValidationError);
  PermeabilityField::check_spd((Mat2() << 2, 1, 1, 2).finished());
}

TEST_CASE("custom problem files") {
  const TempFile mesh("unit_test_problem.mesh", kTestMesh);
  const TempFile data("unit_test_problem.data",
                      "# demo data\n"
                      "k.0 = 2.5\n"
                      "k.1 = 0.5\n"
                      "p0 = 1 -1 0\n"
                      "f = 0.25\n"
                      "gd = 1 -1 0\n"
                      "gn = 0\n"
                      "tf = 2.5\n"
                      "tau = 0.125\n");
  const ProblemSpec ps = load_problem(mesh.path, data.path);
  CHECK(ps.coarse.num_subdomains() == 2);
  CHECK(ps.K.at(0, Vec2(0.5, 0.2))(0, 0) == 2.5);
  CHECK(ps.K.at(1, Vec2(0.2, 0.5))(1, 1) == 0.5);
  CHECK(ps.p0(0.25, 0.9) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(ps.source(0.1, 0.2, 0.3) == 0.25);
  CHECK(ps.dirichlet(0.4, 0.0, 1.0) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(ps.neumann(0.5, 0.5, 1.0) == 0.0);
  CHECK(ps.t_final == 2.5);
  CHECK(ps.default_tau == 0.125);
  CHECK(!ps.exact.has_value());
}

TEST_CASE("custom problem error paths") {
  const TempFile mesh("unit_test_err.mesh", kTestMesh);

  CHECK_THROWS_AS(load_problem("no/such/file.mesh", "also_missing.data"),
                  ParseError);
  CHECK_THROWS_AS(load_problem(mesh.path, "missing_data_file.data"), ParseError);

  {
    const TempFile data("unit_test_err1.data", "weird = 1\n");
    CHECK_THROWS_AS(load_problem(mesh.path, data.path), ParseError);
  }
  {
    const TempFile data("unit_test_err2.data", "k.7 = 1\n");
    CHECK_THROWS_AS(load_problem(mesh.path, data.path), ParseError);
  }
  {
    const TempFile data("unit_test_err3.data", "k = 1\nk = 2\n");
    CHECK_THROWS_AS(load_problem(mesh.path, data.path), ParseError);
  }
  {
    const TempFile data("unit_test_err4.data", "tensor = 1 0 1\nk.0 = 2\n");
    CHECK_THROWS_AS(load_problem(mesh.path, data.path), ParseError);
  }
  {
    const TempFile data("unit_test_err5.data", "gd = 1 2\n");
    CHECK_THROWS_AS(load_problem(mesh.path, data.path), ParseError);
  }
  {
    const TempFile data("unit_test_err6.data", "k = -1\n");
    CHECK_THROWS_AS(load_problem(mesh.path, data.path), ValidationError);
  }
  {
    const TempFile data("unit_test_err7.data", "tf = -2\n");
    CHECK_THROWS_AS(load_problem(mesh.path, data.path), ValidationError);
  }
  {
    const TempFile data("unit_test_err8.data", "just some text\n");
    CHECK_THROWS_AS(load_problem(mesh.path, data.path), ParseError);
  }
}
