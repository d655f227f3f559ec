#include "hiermix/field_io.hpp"

#include "hiermix/rt0.hpp"

#include <fstream>
#include <ostream>
#include <vector>

namespace hiermix {

Vec2 element_velocity(const HierMesh& mesh, const Vector& U, int e, const Vec2& x) {
  const ElemInfo& info = mesh.element(e);
  const auto v = mesh.element_vertices(e);
  const AffineMap map = AffineMap::from_vertices(v[0], v[1], v[2]);
  const Vec2 xhat = map.to_reference(x);
  const double sign = mesh.orientation_sign(e);
  Vec2 u = Vec2::Zero();
  for (int m = 0; m < 3; ++m) {
    const VelocityDof& d = mesh.dof(info.dof[m]);
    u += sign * U[info.dof[m]] * (d.length / 2.0) * map.piola(rt0::basis(m, xhat));
  }
  return u;
}

namespace {

// Points of one subdomain are the oblique nodes 1 <= j <= i <= n+1,
// numbered row-wise in j.
int node_index(int n, int i, int j) {
  return (j - 1) * (n + 2) - (j - 1) * j / 2 + (i - j);
}

int nodes_per_subdomain(int n) { return (n + 1) * (n + 2) / 2; }

}  // namespace

void write_vtk(std::ostream& out, const std::string& title, const HierMesh& mesh,
               const Vector& P, const Vector& U) {
  const int ns = mesh.num_subdomains();
  const int n = ns > 0 ? mesh.subdomain(0).n : 0;
  const int per = nodes_per_subdomain(n);
  const int np = ns * per;
  const int nc = mesh.num_elements();

  out << "# vtk DataFile Version 3.0\n"
      << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << np << " double\n";
  out.precision(9);
  for (int k = 0; k < ns; ++k) {
    const SubdomainGrid& g = mesh.subdomain(k);
    for (int j = 1; j <= n + 1; ++j)
      for (int i = j; i <= n + 1; ++i) {
        const Vec2 x = g.node(i, j);
        out << x.x() << ' ' << x.y() << " 0\n";
      }
  }

  out << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (int e = 0; e < nc; ++e) {
    const ElemInfo& info = mesh.element(e);
    const int base = info.subdomain * per;
    int a, b, c;
    if (info.orient == Orientation::Up) {
      a = node_index(n, info.i, info.j);
      b = node_index(n, info.i + 1, info.j);
      c = node_index(n, info.i + 1, info.j + 1);
    } else {
      a = node_index(n, info.i + 1, info.j + 1);
      b = node_index(n, info.i, info.j + 1);
      c = node_index(n, info.i, info.j);
    }
    out << "3 " << base + a << ' ' << base + b << ' ' << base + c << '\n';
  }

  out << "CELL_TYPES " << nc << '\n';
  for (int e = 0; e < nc; ++e) out << "5\n";

  out << "CELL_DATA " << nc << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < nc; ++e) out << P[e] << '\n';

  out << "VECTORS velocity double\n";
  for (int e = 0; e < nc; ++e) {
    const Vec2 u = element_velocity(mesh, U, e, mesh.element_centroid(e));
    out << u.x() << ' ' << u.y() << " 0\n";
  }
}

void write_vtk_file(const std::string& path, const std::string& title,
                    const HierMesh& mesh, const Vector& P, const Vector& U) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  write_vtk(out, title, mesh, P, U);
}

void write_cell_csv(std::ostream& out, const HierMesh& mesh, const Vector& P,
                    const Vector& U) {
  out << "x,y,subdomain,pressure,vx,vy\n";
  out.precision(9);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Vec2 c = mesh.element_centroid(e);
    const Vec2 u = element_velocity(mesh, U, e, c);
    out << c.x() << ',' << c.y() << ',' << mesh.element(e).subdomain << ','
        << P[e] << ',' << u.x() << ',' << u.y() << '\n';
  }
}

void write_cell_csv_file(const std::string& path, const HierMesh& mesh,
                         const Vector& P, const Vector& U) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  write_cell_csv(out, mesh, P, U);
}

}  // namespace hiermix
