#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hiermix/hier_mesh.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace hiermix;

namespace {

const char* kSquareText = R"(# unit square split along the main diagonal
vertices 4
0 0
1 0
1 1
0 1
triangles 2
0 1 2
0 2 3
boundary 4
0 1 D
1 2 D
2 3 D
3 0 D
)";

CoarseMesh square() {
  std::istringstream in(kSquareText);
  return CoarseMesh::load(in);
}

CoarseMesh single_triangle() {
  return CoarseMesh::build({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}},
                           {{0, 1, BoundaryKind::Dirichlet},
                            {1, 2, BoundaryKind::Dirichlet},
                            {2, 0, BoundaryKind::Dirichlet}});
}

}  // namespace

TEST_CASE("coarse mesh parser") {
  const CoarseMesh m = square();
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_subdomains() == 2);
  CHECK(m.num_edges() == 5);
  CHECK(m.triangle_area(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.triangle_area(1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.diameter() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  int boundary = 0, interior = 0;
  for (const CoarseEdge& e : m.edges()) {
    if (e.tri[1] < 0) {
      ++boundary;
      CHECK(e.marker.has_value());
    } else {
      ++interior;
      CHECK(!e.marker.has_value());
    }
  }
  CHECK(boundary == 4);
  CHECK(interior == 1);
}

TEST_CASE("parser rejects malformed input") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return CoarseMesh::load(in);
  };

  // unmarked boundary edge
  CHECK_THROWS_AS(parse("vertices 3\n0 0\n1 0\n0 1\n"
                        "triangles 1\n0 1 2\n"
                        "boundary 2\n0 1 D\n1 2 D\n"),
                  ValidationError);
  // vertex index out of range
  CHECK_THROWS_AS(parse("vertices 3\n0 0\n1 0\n0 1\n"
                        "triangles 1\n0 1 5\n"
                        "boundary 3\n0 1 D\n1 2 D\n2 0 D\n"),
                  ParseError);
  // marker on an edge that is not part of the triangulation
  CHECK_THROWS_AS(parse("vertices 4\n0 0\n1 0\n1 1\n0 1\n"
                        "triangles 2\n0 1 2\n0 2 3\n"
                        "boundary 5\n0 1 D\n1 2 D\n2 3 D\n3 0 D\n1 3 D\n"),
                  ValidationError);
  // bad marker letter
  CHECK_THROWS_AS(parse("vertices 3\n0 0\n1 0\n0 1\n"
                        "triangles 1\n0 1 2\n"
                        "boundary 3\n0 1 D\n1 2 X\n2 0 D\n"),
                  ParseError);
  // truncated vertex list
  CHECK_THROWS_AS(parse("vertices 3\n0 0\n1 0\n"), ParseError);
  // nonconforming: edge shared by three triangles
  CHECK_THROWS_AS(
      CoarseMesh::build({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, -1}},
                        {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}},
                        {{0, 2, BoundaryKind::Dirichlet},
                         {1, 2, BoundaryKind::Dirichlet},
                         {0, 3, BoundaryKind::Dirichlet},
                         {1, 3, BoundaryKind::Dirichlet},
                         {0, 4, BoundaryKind::Dirichlet},
                         {1, 4, BoundaryKind::Dirichlet}}),
      ValidationError);
  // degenerate (zero-area) triangle
  CHECK_THROWS_AS(CoarseMesh::build({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}},
                                    {{0, 1, BoundaryKind::Dirichlet},
                                     {1, 2, BoundaryKind::Dirichlet},
                                     {2, 0, BoundaryKind::Dirichlet}}),
                  ValidationError);
}

TEST_CASE("clockwise triangles are normalized") {
  const CoarseMesh m =
      CoarseMesh::build({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}},
                        {{0, 1, BoundaryKind::Dirichlet},
                         {1, 2, BoundaryKind::Dirichlet},
                         {2, 0, BoundaryKind::Dirichlet}});
  CHECK(m.triangle_area(0) > 0);
}

TEST_CASE("dof counts, single triangle") {
  const HierMesh mesh = HierMesh::refine(single_triangle(), 1);
  const DofCounts c = mesh.dof_counts();
  CHECK(mesh.num_elements() == 4);
  CHECK(c.n_edges == 9);
  CHECK(c.n_dirichlet == 6);
  CHECK(c.n_neumann == 0);
  CHECK(c.n_gamma == 0);
  CHECK(c.n_velocity == 9);
  CHECK(c.n_gradient == 12);
  CHECK(c.n_pressure == 4);
  CHECK(c.n_multiplier == 0);
}

TEST_CASE("dof counts, two subdomains") {
  const HierMesh mesh = HierMesh::refine(square(), 1);
  const DofCounts c = mesh.dof_counts();
  CHECK(mesh.num_subdomains() == 2);
  CHECK(c.n_pressure == 8);
  CHECK(c.n_edges == 16);
  CHECK(c.n_gamma == 2);
  CHECK(c.n_dirichlet == 8);
  CHECK(c.n_neumann == 0);
  CHECK(c.n_velocity == 18);
  CHECK(c.n_multiplier == 2);
  CHECK(c.n_gradient == 24);

  CHECK(mesh.num_velocity_dofs() == c.n_velocity);
  CHECK(mesh.num_geom_edges() == c.n_edges);
  CHECK(mesh.num_multipliers() == c.n_multiplier);
}

TEST_CASE("element sides match the oblique edge tables") {
  const HierMesh mesh = HierMesh::refine(square(), 2);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto v = mesh.element_vertices(e);
    const Vec2 centroid = (v[0] + v[1] + v[2]) / 3.0;
    CHECK(mesh.element_centroid(e).isApprox(centroid, 1e-13));

    const double area =
        0.5 * ((v[1] - v[0]).x() * (v[2] - v[0]).y() -
               (v[2] - v[0]).x() * (v[1] - v[0]).y());
    CHECK(area > 0);  // counter-clockwise
    CHECK(mesh.element_area(e) == doctest::Approx(area).epsilon(1e-13));

    const ElemInfo& info = mesh.element(e);
    for (int q = 0; q < 3; ++q) {
      // side q is opposite vertex q, mirroring the reference numbering
      const VelocityDof& d = mesh.dof(info.dof[q]);
      const Vec2 mid = 0.5 * (v[(q + 1) % 3] + v[(q + 2) % 3]);
      CHECK((d.midpoint - mid).norm() < 1e-13);
      CHECK(d.midpoint.isApprox(0.5 * (d.a + d.b), 1e-13));
      CHECK(d.length == doctest::Approx((d.b - d.a).norm()).epsilon(1e-13));
      CHECK(d.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::abs(d.normal.dot(d.b - d.a)) < 1e-13);
      // the stored normal points out of the Up cell
      const Vec2 up_c = mesh.element_centroid(d.elem_up);
      CHECK(d.normal.dot(d.midpoint - up_c) > 0);
      CHECK((info.orient == Orientation::Up ? d.elem_up : d.elem_down) == e);
    }
  }
}

TEST_CASE("neighbor lookup is symmetric and crosses interfaces") {
  const HierMesh mesh = HierMesh::refine(square(), 2);
  int interface_crossings = 0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int m = 1; m <= 3; ++m) {
      const int nb = mesh.neighbor_element(e, m);
      if (nb < 0) continue;
      bool back = false;
      for (int mm = 1; mm <= 3; ++mm)
        if (mesh.neighbor_element(nb, mm) == e) back = true;
      CHECK(back);
      if (mesh.element(nb).subdomain != mesh.element(e).subdomain)
        ++interface_crossings;
    }
  }
  // 4 fine interface edges at level 2, seen from both sides
  CHECK(interface_crossings == 8);
}

TEST_CASE("interface edges pair two dofs with opposite normals") {
  const HierMesh mesh = HierMesh::refine(square(), 2);
  std::set<int> lambdas;
  for (int g = 0; g < mesh.num_geom_edges(); ++g) {
    const GeomEdge& ge = mesh.geom_edge(g);
    if (ge.cls != EdgeClass::Interface) {
      CHECK(ge.dof[1] == -1);
      continue;
    }
    REQUIRE(ge.dof[0] >= 0);
    REQUIRE(ge.dof[1] >= 0);
    const VelocityDof& d0 = mesh.dof(ge.dof[0]);
    const VelocityDof& d1 = mesh.dof(ge.dof[1]);
    CHECK(d0.subdomain != d1.subdomain);
    CHECK((d0.midpoint - d1.midpoint).norm() < 1e-13);
    CHECK((d0.normal + d1.normal).norm() < 1e-13);
    CHECK(d0.lambda == d1.lambda);
    CHECK(d0.lambda == ge.lambda);
    CHECK(ge.lambda >= 0);
    lambdas.insert(ge.lambda);
    CHECK(ge.elem[0] >= 0);
    CHECK(ge.elem[1] >= 0);
    CHECK(mesh.element(ge.elem[0]).subdomain != mesh.element(ge.elem[1]).subdomain);
  }
  CHECK(static_cast<int>(lambdas.size()) == 4);
}

TEST_CASE("oblique index round trips") {
  const HierMesh mesh = HierMesh::refine(square(), 2);
  for (int d = 0; d < mesh.num_velocity_dofs(); ++d) {
    const VelocityDof& vd = mesh.dof(d);
    CHECK(mesh.velocity_dof_id(vd.subdomain, vd.i, vd.j, vd.m) == d);
  }
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemInfo& info = mesh.element(e);
    CHECK(mesh.element_id(info.subdomain, info.i, info.j, info.orient) == e);
  }
  CHECK(mesh.element_id(0, 99, 1, Orientation::Up) == -1);
  CHECK_THROWS_AS(mesh.velocity_dof_id(0, 99, 1, 1), ValidationError);
  CHECK_THROWS_AS(mesh.velocity_dof_id(5, 1, 1, 1), ValidationError);
}

TEST_CASE("refinement level bounds") {
  const CoarseMesh m = single_triangle();
  CHECK_THROWS_AS(HierMesh::refine(m, -1), ValidationError);
  CHECK_THROWS_AS(HierMesh::refine(m, 15), ValidationError);
  CHECK(HierMesh::refine(m, 0).num_elements() == 1);
}

TEST_CASE("level 0 mesh is the coarse mesh") {
  const HierMesh mesh = HierMesh::refine(square(), 0);
  CHECK(mesh.num_elements() == 2);
  const DofCounts c = mesh.dof_counts();
  CHECK(c.n_edges == 5);
  CHECK(c.n_velocity == 6);
  CHECK(c.n_multiplier == 1);
  CHECK(c.n_pressure == 2);
}
