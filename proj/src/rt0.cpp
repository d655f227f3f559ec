#include "hiermix/rt0.hpp"

namespace hiermix {

namespace rt0 {

namespace {
const Vec2 kVerts[3] = {Vec2(-1.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, kSqrt3)};
// v_m(x) = (x + kOffset[m]) / sqrt3
const Vec2 kOffset[3] = {Vec2(1.0, 0.0), Vec2(-1.0, 0.0), Vec2(0.0, -kSqrt3)};
}  // namespace

Vec2 vertex(int i) { return kVerts[i]; }

Vec2 edge_midpoint(int m) {
  // Edge m joins the two vertices other than m.
  return 0.5 * (kVerts[(m + 1) % 3] + kVerts[(m + 2) % 3]);
}

Vec2 centroid() { return Vec2(0.0, kSqrt3 / 3.0); }

double area() { return kSqrt3; }

Vec2 normal(int m) {
  switch (m) {
    case 0: return Vec2(kSqrt3 / 2.0, 0.5);
    case 1: return Vec2(-kSqrt3 / 2.0, 0.5);
    default: return Vec2(0.0, -1.0);
  }
}

Vec2 basis(int m, const Vec2& xhat) { return (xhat + kOffset[m]) / kSqrt3; }

double basis_div() { return 2.0 / kSqrt3; }

}  // namespace rt0

AffineMap AffineMap::from_vertices(const Vec2& p1, const Vec2& p2, const Vec2& p3) {
  AffineMap map;
  map.B.col(0) = 0.5 * (p2 - p1);
  map.B.col(1) = (2.0 * p3 - p2 - p1) / (2.0 * rt0::kSqrt3);
  map.b = 0.5 * (p1 + p2);
  map.J = map.B.determinant();
  if (!(map.J > 0.0))
    throw ValidationError("degenerate or clockwise triangle in affine map");
  return map;
}

Mat2 AffineMap::pullback_tensor(const Mat2& K) const {
  Mat2 Binv = B.inverse();
  return Binv * K * Binv.transpose();
}

double quad_vertex_center(const std::function<Vec2(const Vec2&)>& q,
                          const std::function<Vec2(const Vec2&)>& v) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += q(rt0::vertex(i)).dot(v(rt0::vertex(i)));
  s += 3.0 * q(rt0::centroid()).dot(v(rt0::centroid()));
  return rt0::area() / 6.0 * s;
}

double quad_edge_midpoints_ref(const std::function<double(const Vec2&)>& f) {
  double s = 0.0;
  for (int m = 0; m < 3; ++m) s += f(rt0::edge_midpoint(m));
  return rt0::area() / 3.0 * s;
}

double quad_edge_midpoints(const Vec2& p1, const Vec2& p2, const Vec2& p3,
                           const std::function<double(const Vec2&)>& f) {
  double area = 0.5 * ((p2.x() - p1.x()) * (p3.y() - p1.y()) -
                       (p3.x() - p1.x()) * (p2.y() - p1.y()));
  double s = f(0.5 * (p1 + p2)) + f(0.5 * (p2 + p3)) + f(0.5 * (p3 + p1));
  return std::abs(area) / 3.0 * s;
}

double simpson_edge(const Vec2& a, const Vec2& b,
                    const std::function<double(const Vec2&)>& f) {
  double len = (b - a).norm();
  return len / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

}  // namespace hiermix
