#include "hiermix/stencil.hpp"

#include "hiermix/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hiermix {

StencilSet stencil_coeffs(const SubdomainGrid& g, const Mat2& K) {
  StencilSet s{};
  s.a = pullback_a_table(g.up_map, K);
  const auto& a = s.a;
  const double row1 = a(0, 0) + a(0, 1) + a(0, 2);
  const double row2 = a(1, 0) + a(1, 1) + a(1, 2);
  const double row3 = a(2, 0) + a(2, 1) + a(2, 2);
  const double diag =
      6.0 * (a(0, 0) + a(1, 1) + a(2, 2) + a(0, 1) + a(0, 2) + a(1, 2));

  auto at = [](double(&t)[3][3], int di, int dj) -> double& {
    return t[di + 1][dj + 1];
  };

  at(s.uu, 0, 0) = diag;
  at(s.uu, -1, 0) = at(s.uu, 1, 0) = 3.0 * a(0, 1);
  at(s.uu, 0, -1) = at(s.uu, 0, 1) = 3.0 * a(1, 2);
  at(s.uu, 1, 1) = at(s.uu, -1, -1) = 3.0 * a(0, 2);

  at(s.ud, 0, 0) = -6.0 * row2;
  at(s.ud, 1, 0) = -6.0 * row1;
  at(s.ud, 0, -1) = -6.0 * row3;

  at(s.du, 0, 0) = -6.0 * row2;
  at(s.du, -1, 0) = -6.0 * row1;
  at(s.du, 0, 1) = -6.0 * row3;

  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) s.dd[p][q] = s.uu[p][q];
  return s;
}

bool stencil_interior(const SubdomainGrid& g, int i, int j, Orientation o) {
  const int n = g.n;
  if (o == Orientation::Up) return j >= 2 && j <= n - 2 && i >= j + 1 && i <= n - 1;
  return j >= 2 && j <= n - 2 && i >= j + 2 && i <= n - 1;
}

StencilRow stencil_row(const HierMesh& mesh, int k, const StencilSet& s, int i,
                       int j, Orientation o) {
  StencilRow row;
  int nn = 0;
  const bool up = o == Orientation::Up;
  const double(&same)[3][3] = up ? s.uu : s.dd;
  const double(&cross)[3][3] = up ? s.ud : s.du;
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const double cs = same[di + 1][dj + 1];
      if (cs != 0.0) {
        row.col[nn] = mesh.element_id(k, i + di, j + dj, o);
        row.val[nn++] = cs;
      }
      const double cc = cross[di + 1][dj + 1];
      if (cc != 0.0) {
        row.col[nn] = mesh.element_id(k, i + di, j + dj,
                                      up ? Orientation::Down : Orientation::Up);
        row.val[nn++] = cc;
      }
    }
  }
  while (nn < 10) {
    row.col[nn] = -1;
    row.val[nn++] = 0.0;
  }
  return row;
}

StencilEngine::StencilEngine(const HierMesh& mesh, const PermeabilityField& K,
                             const SpMat& M)
    : mesh_(mesh), M_(M), sets_(mesh.num_subdomains()) {
  for (int k = 0; k < mesh.num_subdomains(); ++k) {
    if (!K.constant_on(k)) continue;
    const SubdomainGrid& g = mesh.subdomain(k);
    sets_[k] = stencil_coeffs(g, K.at(k, g.up_map.b));
  }
}

const StencilSet& StencilEngine::stencil(int k) const {
  if (!sets_[k]) throw ValidationError("subdomain has no stencil (permeability not constant)");
  return *sets_[k];
}

double StencilEngine::row_value(const Vector& x, int e) const {
  const ElemInfo& info = mesh_.element(e);
  const int k = info.subdomain;
  const SubdomainGrid& g = mesh_.subdomain(k);
  if (sets_[k] && stencil_interior(g, info.i, info.j, info.orient)) {
    const StencilSet& s = *sets_[k];
    const bool up = info.orient == Orientation::Up;
    const double(&same)[3][3] = up ? s.uu : s.dd;
    const double(&cross)[3][3] = up ? s.ud : s.du;
    const Orientation other = up ? Orientation::Down : Orientation::Up;
    double acc = 0;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const double cs = same[di + 1][dj + 1];
        if (cs != 0.0)
          acc += cs * x[mesh_.element_id(k, info.i + di, info.j + dj, info.orient)];
        const double cc = cross[di + 1][dj + 1];
        if (cc != 0.0)
          acc += cc * x[mesh_.element_id(k, info.i + di, info.j + dj, other)];
      }
    }
    return acc;
  }
  double acc = 0;
  for (SpMat::InnerIterator it(M_, e); it; ++it) acc += it.value() * x[it.col()];
  return acc;
}

void StencilEngine::apply(const Vector& x, Vector& y) const {
  const int nw = static_cast<int>(x.size());
  y.resize(nw);
#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (int e = 0; e < nw; ++e) y[e] = row_value(x, e);
}

void StencilEngine::apply_serial(const Vector& x, Vector& y) const {
  const int nw = static_cast<int>(x.size());
  y.resize(nw);
  for (int e = 0; e < nw; ++e) y[e] = row_value(x, e);
}

double validate_stencils(const HierMesh& mesh, const StencilEngine& engine,
                         const SpMat& M) {
  double worst = 0;
  std::vector<double> dense(mesh.num_elements(), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElemInfo& info = mesh.element(e);
    const int k = info.subdomain;
    if (!engine.has_stencil(k)) continue;
    if (!stencil_interior(mesh.subdomain(k), info.i, info.j, info.orient)) continue;

    const StencilRow row =
        stencil_row(mesh, k, engine.stencil(k), info.i, info.j, info.orient);
    double scale = 0;
    for (int q = 0; q < 10; ++q) {
      if (row.col[q] < 0) continue;
      dense[row.col[q]] = row.val[q];
      scale = std::max(scale, std::abs(row.val[q]));
    }
    for (SpMat::InnerIterator it(M, e); it; ++it) {
      worst = std::max(worst, std::abs(it.value() - dense[it.col()]) / scale);
      dense[it.col()] = 0.0;
    }
    for (int q = 0; q < 10; ++q) {
      // any stencil entry with no assembled counterpart counts in full
      if (row.col[q] >= 0 && dense[row.col[q]] != 0.0) {
        worst = std::max(worst, std::abs(dense[row.col[q]]) / scale);
        dense[row.col[q]] = 0.0;
      }
    }
  }
  return worst;
}

}  // namespace hiermix
