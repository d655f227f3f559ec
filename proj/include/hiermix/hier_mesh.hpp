#pragma once

#include "hiermix/coarse_mesh.hpp"
#include "hiermix/rt0.hpp"
#include "hiermix/types.hpp"

#include <array>
#include <vector>

namespace hiermix {

enum class EdgeClass : uint8_t {
  SubdomainInterior,  // both elements inside one subdomain
  Interface,          // shared by two subdomains (carries a multiplier)
  DirichletBoundary,  // on a Dirichlet part of the outer boundary
  NeumannBoundary,    // on a Neumann part (carries a multiplier)
};

enum class Orientation : uint8_t { Up, Down };

/// Dimensions of the discrete spaces.
struct DofCounts {
  int n_edges = 0;       // distinct geometric fine edges
  int n_gamma = 0;       // interface + Neumann edges (multiplier support)
  int n_dirichlet = 0;   // Dirichlet boundary edges
  int n_neumann = 0;     // Neumann boundary edges
  int n_velocity = 0;    // velocity dofs (one per edge per adjacent subdomain)
  int n_gradient = 0;    // adjusted-gradient space dimension
  int n_pressure = 0;    // elements
  int n_multiplier = 0;  // Lagrange multiplier dofs
};

/// Uniform refinement of one coarse triangle (corners A, B, C, counter-
/// clockwise) into n^2 = 4^level congruent cells.
///
/// Grid nodes use oblique indices (i,j), 1 <= j <= i <= n+1:
///   node(i,j) = A + (i-j) u + (j-1) w,  u = (B-A)/n,  w = (C-A)/n,
/// so A = node(1,1), B = node(n+1,1), C = node(n+1,n+1).
///
/// Edges come in three families, each parallel to one side of the coarse
/// triangle (side m is opposite corner m):
///   e1(i,j): node(i,j) -> node(i,j+1)     (parallel to side B-C)
///   e2(i,j): node(i,j) -> node(i+1,j+1)   (parallel to side A-C)
///   e3(i,j): node(i,j) -> node(i+1,j)     (parallel to side A-B)
///
/// Cells: Up(i,j) has corners node(i,j), node(i+1,j), node(i+1,j+1) and sides
/// e2(i,j), e3(i,j), e1(i+1,j); Down(i,j) has corners node(i+1,j+1),
/// node(i,j+1), node(i,j) and sides e2(i,j), e1(i,j), e3(i,j+1).  Both vertex
/// orders are counter-clockwise and the Down affine matrix is the negative of
/// the Up one, so all cells share a single |det|.
///
/// Edge normals are fixed to point out of the Up cell (equivalently into the
/// Down cell); on the subdomain boundary this is always the outward direction.
struct SubdomainGrid {
  int n = 0;
  Vec2 corner[3];
  Vec2 u, w;           // oblique steps
  double l[3];         // fine edge length per family
  Vec2 normal[3];      // fixed unit normal per family
  AffineMap up_map;    // affine map of Up(1,1); every Up shares its matrix
  double elem_area = 0.0;
  int elem_offset = 0, n_elems = 0;  // global element id range
  int dof_offset = 0, n_edges = 0;   // global velocity dof range

  Vec2 node(int i, int j) const {
    return corner[0] + double(i - j) * u + double(j - 1) * w;
  }
  bool valid_up(int i, int j) const { return j >= 1 && j <= n && i >= j && i <= n; }
  bool valid_down(int i, int j) const {
    return j >= 1 && j <= n - 1 && i >= j + 1 && i <= n;
  }
  bool valid_edge(int m, int i, int j) const {
    switch (m) {
      case 1: return j >= 1 && j <= n && i >= j + 1 && i <= n + 1;
      case 2: return j >= 1 && j <= n && i >= j && i <= n;
      case 3: return j >= 1 && j <= n && i >= j && i <= n;
      default: return false;
    }
  }
  /// Direction vector of a family-m edge (from its base node).
  Vec2 edge_dir(int m) const {
    switch (m) {
      case 1: return w - u;
      case 2: return w;
      default: return u;
    }
  }
};

/// One velocity degree of freedom: the normal flux through one fine edge,
/// seen from one subdomain.  Interface edges have two dofs (one per side)
/// with opposite normals; all other edges have one.
struct VelocityDof {
  int subdomain = -1;
  int i = 0, j = 0, m = 0;  // oblique index and family, m in {1,2,3}
  EdgeClass cls = EdgeClass::SubdomainInterior;
  int geom_edge = -1;       // shared geometric edge id
  int lambda = -1;          // multiplier id (interface/Neumann), else -1
  int elem_up = -1;         // adjacent Up element (always exists)
  int elem_down = -1;       // adjacent Down element, -1 on subdomain boundary
  Vec2 midpoint;
  Vec2 a, b;                // endpoints
  Vec2 normal;              // fixed unit normal of this side's convention
  double length = 0.0;
};

/// Distinct geometric fine edge (interface edges appear once).
struct GeomEdge {
  EdgeClass cls = EdgeClass::SubdomainInterior;
  int lambda = -1;
  std::array<int, 2> dof = {-1, -1};   // one per side; [1] only for interfaces
  std::array<int, 2> elem = {-1, -1};  // adjacent elements (global), -1 if none
};

struct ElemInfo {
  int subdomain = -1;
  int i = 0, j = 0;
  Orientation orient = Orientation::Up;
  int dof[3] = {-1, -1, -1};  // velocity dof of the family-m side, m = 1..3
};

/// Hierarchical mesh: every coarse triangle refined `level` times.
class HierMesh {
 public:
  static HierMesh refine(const CoarseMesh& coarse, int level);

  const CoarseMesh& coarse() const { return coarse_; }
  int level() const { return level_; }
  int num_subdomains() const { return static_cast<int>(sub_.size()); }
  int num_elements() const { return static_cast<int>(elems_.size()); }
  int num_velocity_dofs() const { return static_cast<int>(dofs_.size()); }
  int num_geom_edges() const { return static_cast<int>(geom_.size()); }
  int num_multipliers() const { return n_lambda_; }

  const SubdomainGrid& subdomain(int k) const { return sub_.at(k); }
  const ElemInfo& element(int e) const { return elems_.at(e); }
  const VelocityDof& dof(int d) const { return dofs_.at(d); }
  const GeomEdge& geom_edge(int g) const { return geom_.at(g); }

  DofCounts dof_counts() const;

  /// Element id for oblique index (i,j); -1 if no such element.
  int element_id(int k, int i, int j, Orientation o) const;
  /// Velocity dof id for edge (i,j,m) of subdomain k; throws on invalid index.
  int velocity_dof_id(int k, int i, int j, int m) const;
  /// Geometric edge id; interface edges resolve to the single shared id.
  int edge_global_id(int k, int i, int j, int m) const;

  std::array<Vec2, 3> element_vertices(int e) const;
  Vec2 element_centroid(int e) const;
  double element_area(int e) const { return sub_[elems_[e].subdomain].elem_area; }
  /// +1 for Up elements, -1 for Down: sign relating the element-local Piola
  /// basis to the global fixed-normal basis.
  double orientation_sign(int e) const {
    return elems_[e].orient == Orientation::Up ? 1.0 : -1.0;
  }
  /// Element on the other side of side m (1..3) of element e, looked up
  /// through the geometric edge (crosses interfaces); -1 on the boundary.
  int neighbor_element(int e, int m) const;

 private:
  CoarseMesh coarse_;
  int level_ = 0;
  std::vector<SubdomainGrid> sub_;
  std::vector<ElemInfo> elems_;
  std::vector<VelocityDof> dofs_;
  std::vector<GeomEdge> geom_;
  int n_lambda_ = 0;

  // local index tables, shared by all subdomains (same n)
  int n_ = 1;
  std::vector<int> up_idx_, down_idx_, edge_idx_[3];
  int flat(int i, int j) const { return (j - 1) * (n_ + 1) + (i - 1); }
  int up_local(int i, int j) const;
  int down_local(int i, int j) const;
  int edge_local(int m, int i, int j) const;
};

}  // namespace hiermix
