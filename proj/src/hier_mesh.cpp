#include "hiermix/hier_mesh.hpp"

#include <algorithm>
#include <cmath>

namespace hiermix {

namespace {

// Fine edges along side m of a subdomain, in local traversal order:
//   side 1 (B->C): e1(n+1,j), j = 1..n
//   side 2 (A->C): e2(j,j),   j = 1..n
//   side 3 (A->B): e3(i,1),   i = 1..n
// Position of edge (i,j,m) along its side in that order:
int side_position(int m, int i, int j) { return m == 3 ? i - 1 : j - 1; }

// Which side of the subdomain edge (i,j,m) lies on; 0 if none.
int side_of(int n, int m, int i, int j) {
  if (m == 1 && i == n + 1) return 1;
  if (m == 2 && i == j) return 2;
  if (m == 3 && j == 1) return 3;
  return 0;
}

struct SideStore {
  std::vector<int> geom;
  std::vector<Vec2> mid;
  std::vector<Vec2> normal;
};

}  // namespace

int HierMesh::up_local(int i, int j) const { return up_idx_[flat(i, j)]; }
int HierMesh::down_local(int i, int j) const { return down_idx_[flat(i, j)]; }
int HierMesh::edge_local(int m, int i, int j) const {
  return edge_idx_[m - 1][flat(i, j)];
}

HierMesh HierMesh::refine(const CoarseMesh& coarse, int level) {
  if (level < 0) throw ValidationError("refinement level must be non-negative");
  if (level > 14) throw ValidationError("refinement level too large");

  HierMesh mesh;
  mesh.coarse_ = coarse;
  mesh.level_ = level;
  const int n = 1 << level;
  mesh.n_ = n;
  const int s = coarse.num_subdomains();
  const int elems_per_sub = n * n;
  const int edges_per_sub = 3 * n * (n + 1) / 2;

  // Local index tables in (j,i) / (j,i,m) lexicographic order; all
  // subdomains share them since the refinement is uniform.
  const int tab = (n + 1) * (n + 1);
  mesh.up_idx_.assign(tab, -1);
  mesh.down_idx_.assign(tab, -1);
  for (int m = 0; m < 3; ++m) mesh.edge_idx_[m].assign(tab, -1);
  {
    int id = 0;
    for (int j = 1; j <= n; ++j)
      for (int i = j; i <= n; ++i) mesh.up_idx_[mesh.flat(i, j)] = id++;
    for (int j = 1; j + 1 <= n; ++j)
      for (int i = j + 1; i <= n; ++i) mesh.down_idx_[mesh.flat(i, j)] = id++;
    int ed = 0;
    SubdomainGrid probe;
    probe.n = n;
    for (int j = 1; j <= n; ++j)
      for (int i = j; i <= n + 1; ++i)
        for (int m = 1; m <= 3; ++m)
          if (probe.valid_edge(m, i, j)) mesh.edge_idx_[m - 1][mesh.flat(i, j)] = ed++;
  }

  // Subdomain geometry.
  mesh.sub_.resize(s);
  for (int k = 0; k < s; ++k) {
    SubdomainGrid& g = mesh.sub_[k];
    g.n = n;
    const auto& tri = coarse.triangle(k);
    for (int c = 0; c < 3; ++c) g.corner[c] = coarse.vertex(tri[c]);
    g.u = (g.corner[1] - g.corner[0]) / double(n);
    g.w = (g.corner[2] - g.corner[0]) / double(n);
    const Vec2 d1 = g.w - g.u;
    g.l[0] = d1.norm();
    g.l[1] = g.w.norm();
    g.l[2] = g.u.norm();
    // Outward normals for counter-clockwise traversal directions d1, -w, u.
    g.normal[0] = Vec2(d1.y(), -d1.x()) / g.l[0];
    g.normal[1] = Vec2(-g.w.y(), g.w.x()) / g.l[1];
    g.normal[2] = Vec2(g.u.y(), -g.u.x()) / g.l[2];
    // built from u, w directly (not via vertex differences) so that the map
    // of level l is the level-0 map scaled by exact powers of two
    g.up_map.B.col(0) = g.u / 2.0;
    g.up_map.B.col(1) = (2.0 * g.w - g.u) / (2.0 * rt0::kSqrt3);
    g.up_map.b = g.corner[0] + g.u / 2.0;
    g.up_map.J = g.up_map.B.determinant();
    if (!(g.up_map.J > 0))
      throw ValidationError("degenerate subdomain triangle");
    g.elem_area = g.up_map.J * rt0::area();
    g.elem_offset = k * elems_per_sub;
    g.n_elems = elems_per_sub;
    g.dof_offset = k * edges_per_sub;
    g.n_edges = edges_per_sub;
  }

  // Elements, in local id order (Ups then Downs).
  mesh.elems_.reserve(size_t(s) * elems_per_sub);
  for (int k = 0; k < s; ++k) {
    for (int j = 1; j <= n; ++j)
      for (int i = j; i <= n; ++i) {
        ElemInfo e;
        e.subdomain = k;
        e.i = i;
        e.j = j;
        e.orient = Orientation::Up;
        e.dof[0] = mesh.sub_[k].dof_offset + mesh.edge_local(1, i + 1, j);
        e.dof[1] = mesh.sub_[k].dof_offset + mesh.edge_local(2, i, j);
        e.dof[2] = mesh.sub_[k].dof_offset + mesh.edge_local(3, i, j);
        mesh.elems_.push_back(e);
      }
    for (int j = 1; j + 1 <= n; ++j)
      for (int i = j + 1; i <= n; ++i) {
        ElemInfo e;
        e.subdomain = k;
        e.i = i;
        e.j = j;
        e.orient = Orientation::Down;
        e.dof[0] = mesh.sub_[k].dof_offset + mesh.edge_local(1, i, j);
        e.dof[1] = mesh.sub_[k].dof_offset + mesh.edge_local(2, i, j);
        e.dof[2] = mesh.sub_[k].dof_offset + mesh.edge_local(3, i, j + 1);
        mesh.elems_.push_back(e);
      }
  }

  // Velocity dofs and geometric edges.  Subdomains are processed in order;
  // an interface side owned by the lower-numbered subdomain registers its
  // geometric edges, the partner side looks them up by position along the
  // side (canonical direction: from the smaller to the larger coarse vertex
  // id) and cross-checks midpoints.
  const double tol = 1e-12 * std::max(coarse.diameter(), 1.0);
  std::vector<SideStore> store(coarse.num_edges());
  mesh.dofs_.reserve(size_t(s) * edges_per_sub);

  for (int k = 0; k < s; ++k) {
    const SubdomainGrid& g = mesh.sub_[k];
    const auto& tri = coarse.triangle(k);
    for (int j = 1; j <= n; ++j)
      for (int i = j; i <= n + 1; ++i)
        for (int m = 1; m <= 3; ++m) {
          if (!g.valid_edge(m, i, j)) continue;
          VelocityDof d;
          d.subdomain = k;
          d.i = i;
          d.j = j;
          d.m = m;
          d.a = g.node(i, j);
          d.b = d.a + g.edge_dir(m);
          d.midpoint = 0.5 * (d.a + d.b);
          d.normal = g.normal[m - 1];
          d.length = g.l[m - 1];
          switch (m) {
            case 1:
              d.elem_up = mesh.element_id(k, i - 1, j, Orientation::Up);
              d.elem_down = mesh.element_id(k, i, j, Orientation::Down);
              break;
            case 2:
              d.elem_up = mesh.element_id(k, i, j, Orientation::Up);
              d.elem_down = mesh.element_id(k, i, j, Orientation::Down);
              break;
            case 3:
              d.elem_up = mesh.element_id(k, i, j, Orientation::Up);
              d.elem_down = mesh.element_id(k, i, j - 1, Orientation::Down);
              break;
          }

          const int dof_id = static_cast<int>(mesh.dofs_.size());
          const int side = side_of(n, m, i, j);
          if (side == 0) {
            d.cls = EdgeClass::SubdomainInterior;
            d.geom_edge = static_cast<int>(mesh.geom_.size());
            GeomEdge ge;
            ge.cls = d.cls;
            ge.dof = {dof_id, -1};
            ge.elem = {d.elem_up, d.elem_down};
            mesh.geom_.push_back(ge);
            mesh.dofs_.push_back(d);
            continue;
          }

          const int ce = coarse.edge_of_side(k, side - 1);
          const CoarseEdge& cedge = coarse.edge(ce);
          if (cedge.tri[1] < 0) {
            d.cls = *cedge.marker == BoundaryKind::Dirichlet
                        ? EdgeClass::DirichletBoundary
                        : EdgeClass::NeumannBoundary;
            d.geom_edge = static_cast<int>(mesh.geom_.size());
            GeomEdge ge;
            ge.cls = d.cls;
            ge.dof = {dof_id, -1};
            ge.elem = {d.elem_up, -1};
            mesh.geom_.push_back(ge);
            mesh.dofs_.push_back(d);
            continue;
          }

          // Interface side.
          d.cls = EdgeClass::Interface;
          int va, vb;  // side endpoints as coarse vertex ids, traversal order
          switch (side) {
            case 1: va = tri[1]; vb = tri[2]; break;
            case 2: va = tri[0]; vb = tri[2]; break;
            default: va = tri[0]; vb = tri[1]; break;
          }
          int q = side_position(m, i, j);
          if (va > vb) q = n - 1 - q;
          const int other = cedge.tri[0] == k ? cedge.tri[1] : cedge.tri[0];
          SideStore& st = store[ce];
          if (k < other) {
            if (st.geom.empty()) {
              st.geom.assign(n, -1);
              st.mid.assign(n, Vec2::Zero());
              st.normal.assign(n, Vec2::Zero());
            }
            d.geom_edge = static_cast<int>(mesh.geom_.size());
            GeomEdge ge;
            ge.cls = d.cls;
            ge.dof = {dof_id, -1};
            ge.elem = {d.elem_up, -1};
            mesh.geom_.push_back(ge);
            st.geom[q] = d.geom_edge;
            st.mid[q] = d.midpoint;
            st.normal[q] = d.normal;
          } else {
            if (st.geom.empty() || st.geom[q] < 0)
              throw ValidationError("interface matching failed: owner side missing");
            if ((st.mid[q] - d.midpoint).norm() > tol)
              throw ValidationError("interface fine edges do not coincide");
            if ((st.normal[q] + d.normal).norm() > 1e-10)
              throw ValidationError("interface normals are not opposite");
            d.geom_edge = st.geom[q];
            GeomEdge& ge = mesh.geom_[d.geom_edge];
            ge.dof[1] = dof_id;
            ge.elem[1] = d.elem_up;
          }
          mesh.dofs_.push_back(d);
        }
  }

  // Multiplier numbering follows geometric edge order.
  for (GeomEdge& ge : mesh.geom_) {
    if (ge.cls == EdgeClass::Interface || ge.cls == EdgeClass::NeumannBoundary)
      ge.lambda = mesh.n_lambda_++;
  }
  for (VelocityDof& d : mesh.dofs_) d.lambda = mesh.geom_[d.geom_edge].lambda;

  return mesh;
}

DofCounts HierMesh::dof_counts() const {
  DofCounts c;
  c.n_edges = num_geom_edges();
  for (const GeomEdge& g : geom_) {
    switch (g.cls) {
      case EdgeClass::Interface: ++c.n_gamma; break;
      case EdgeClass::NeumannBoundary: ++c.n_gamma; ++c.n_neumann; break;
      case EdgeClass::DirichletBoundary: ++c.n_dirichlet; break;
      default: break;
    }
  }
  c.n_velocity = c.n_edges + c.n_gamma - c.n_neumann;
  c.n_gradient = 2 * c.n_edges - c.n_dirichlet - c.n_neumann;
  c.n_pressure = num_elements();
  c.n_multiplier = c.n_gamma;
  return c;
}

int HierMesh::element_id(int k, int i, int j, Orientation o) const {
  if (k < 0 || k >= num_subdomains()) return -1;
  const SubdomainGrid& g = sub_[k];
  if (o == Orientation::Up)
    return g.valid_up(i, j) ? g.elem_offset + up_local(i, j) : -1;
  return g.valid_down(i, j) ? g.elem_offset + down_local(i, j) : -1;
}

int HierMesh::velocity_dof_id(int k, int i, int j, int m) const {
  if (k < 0 || k >= num_subdomains())
    throw ValidationError("subdomain index out of range");
  if (!sub_[k].valid_edge(m, i, j))
    throw ValidationError("invalid oblique edge index (" + std::to_string(i) + "," +
                          std::to_string(j) + "," + std::to_string(m) + ")");
  return sub_[k].dof_offset + edge_local(m, i, j);
}

int HierMesh::edge_global_id(int k, int i, int j, int m) const {
  return dofs_[velocity_dof_id(k, i, j, m)].geom_edge;
}

std::array<Vec2, 3> HierMesh::element_vertices(int e) const {
  const ElemInfo& el = elems_.at(e);
  const SubdomainGrid& g = sub_[el.subdomain];
  const Vec2 base = g.node(el.i, el.j);
  if (el.orient == Orientation::Up)
    return {base, base + g.u, base + g.w};
  return {base + g.w, base + g.w - g.u, base};
}

Vec2 HierMesh::element_centroid(int e) const {
  const ElemInfo& el = elems_[e];
  const SubdomainGrid& g = sub_[el.subdomain];
  const Vec2 base = g.node(el.i, el.j);
  if (el.orient == Orientation::Up) return base + (g.u + g.w) / 3.0;
  return base + (2.0 * g.w - g.u) / 3.0;
}

int HierMesh::neighbor_element(int e, int m) const {
  const GeomEdge& g = geom_[dofs_[elems_.at(e).dof[m - 1]].geom_edge];
  if (g.elem[0] == e) return g.elem[1];
  return g.elem[0];
}

}  // namespace hiermix
