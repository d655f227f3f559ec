#pragma once

#include "hiermix/types.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hiermix {

enum class BoundaryKind : uint8_t { Dirichlet, Neumann };

/// Edge of the coarse (subdomain) triangulation.  tri[1] < 0 on the boundary.
struct CoarseEdge {
  int v0 = -1, v1 = -1;              // v0 < v1
  std::array<int, 2> tri = {-1, -1};
  std::optional<BoundaryKind> marker;
};

/// Conforming triangulation of the polygonal domain into subdomains.  Each
/// triangle becomes one subdomain of the decomposition; triangles are stored
/// counter-clockwise (orientation is normalized on construction).  Every
/// boundary edge must carry a Dirichlet or Neumann marker.
class CoarseMesh {
 public:
  CoarseMesh() = default;

  /// Builds and validates a mesh from raw arrays.  Markers are given as
  /// (v0, v1, kind) for boundary edges in either vertex order.
  static CoarseMesh build(std::vector<Vec2> vertices,
                          std::vector<std::array<int, 3>> triangles,
                          const std::vector<std::tuple<int, int, BoundaryKind>>& markers);

  /// Parses the mesh text format:
  ///   vertices <n>    followed by n "x y" lines
  ///   triangles <s>   followed by s "v1 v2 v3" lines (0-based)
  ///   boundary <b>    followed by b "v1 v2 D|N" lines
  /// '#' starts a comment; blank lines are ignored.
  static CoarseMesh load(std::istream& in);
  static CoarseMesh load_file(const std::string& path);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_subdomains() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Vec2& vertex(int i) const { return vertices_[i]; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const CoarseEdge& edge(int e) const { return edges_[e]; }
  const std::vector<CoarseEdge>& edges() const { return edges_; }

  double triangle_area(int t) const;
  /// Largest pairwise vertex distance; used to scale geometric tolerances.
  double diameter() const;

  /// Index of the edge opposite local vertex m (0-based) of triangle t.
  int edge_of_side(int t, int m) const { return side_edge_[t][m]; }

 private:
  void validate_and_index(const std::vector<std::tuple<int, int, BoundaryKind>>& markers);

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<CoarseEdge> edges_;
  std::vector<std::array<int, 3>> side_edge_;
};

}  // namespace hiermix
