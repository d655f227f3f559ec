#pragma once

#include "hiermix/types.hpp"

#include <array>
#include <functional>

namespace hiermix {

/// Lowest-order Raviart-Thomas space on the reference triangle with vertices
/// r1 = (-1,0), r2 = (1,0), r3 = (0,sqrt(3)).  All reference edges have
/// length 2 and the reference area is sqrt(3).  Edge m is opposite vertex m;
/// the basis function for edge m is
///   v_m(x) = (x + c_m)/sqrt(3),  c_1 = (1,0), c_2 = (-1,0), c_3 = (0,-sqrt(3)),
/// normalized so that v_m . n_k = delta_mk on edge k (outward unit normals).
namespace rt0 {

inline constexpr double kSqrt3 = 1.7320508075688772935;

/// Reference vertices r1..r3 (0-based index).
Vec2 vertex(int i);

/// Reference edge midpoints, edge m opposite vertex m (0-based index).
Vec2 edge_midpoint(int m);

/// Reference centroid (0, sqrt(3)/3).
Vec2 centroid();

/// Reference area |T| = sqrt(3).
double area();

/// Outward unit normal of reference edge m (0-based index).
Vec2 normal(int m);

/// Basis function for edge m (0-based index) at a reference point.
Vec2 basis(int m, const Vec2& xhat);

/// Divergence of every reference basis function (constant 2/sqrt(3)).
double basis_div();

}  // namespace rt0

/// Affine map F(x) = B x + b from the reference triangle onto the physical
/// triangle (p1, p2, p3); the vertex order must be counter-clockwise.
///   B = [ (x2-x1)/2  (2 x3-x2-x1)/(2 sqrt3) ]      b = ( (x1+x2)/2 )
///       [ (y2-y1)/2  (2 y3-y2-y1)/(2 sqrt3) ]          ( (y1+y2)/2 )
struct AffineMap {
  Mat2 B;
  Vec2 b;
  double J = 0.0;  // det B > 0

  static AffineMap from_vertices(const Vec2& p1, const Vec2& p2, const Vec2& p3);

  Vec2 to_physical(const Vec2& xhat) const { return B * xhat + b; }
  Vec2 to_reference(const Vec2& x) const { return B.inverse() * (x - b); }

  /// Piola image (1/J) B q of a reference vector value q.
  Vec2 piola(const Vec2& q) const { return (B * q) / J; }

  /// B^{-1} K B^{-T}, the tensor appearing in the adjusted-gradient bilinear
  /// form after pullback to the reference triangle.
  Mat2 pullback_tensor(const Mat2& K) const;
};

/// Vertex-plus-center rule on the reference triangle,
///   (q,v)_Q = (|T|/6) [ sum_i q(r_i).v(r_i) + 3 q(c).v(c) ],
/// exact for integrands of degree 1.  Under this rule the scaled RT0 basis
/// functions are orthogonal, which is what diagonalizes A2.
double quad_vertex_center(const std::function<Vec2(const Vec2&)>& q,
                          const std::function<Vec2(const Vec2&)>& v);

/// Edge-midpoint rule on the reference triangle, (|T|/3) sum_m f(mid_m),
/// exact for degree 2.
double quad_edge_midpoints_ref(const std::function<double(const Vec2&)>& f);

/// Edge-midpoint rule on a physical triangle, (|T|/3) sum_m f(x_m) with x_m
/// the three edge midpoints; exact for degree 2.
double quad_edge_midpoints(const Vec2& p1, const Vec2& p2, const Vec2& p3,
                           const std::function<double(const Vec2&)>& f);

/// Simpson rule for a line integral over the segment [a, b],
/// (|b-a|/6) [ f(a) + 4 f(mid) + f(b) ]; exact for cubics.
double simpson_edge(const Vec2& a, const Vec2& b,
                    const std::function<double(const Vec2&)>& f);

}  // namespace hiermix
