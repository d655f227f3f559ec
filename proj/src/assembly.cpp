#include "hiermix/assembly.hpp"

#include "hiermix/parallel.hpp"
#include "hiermix/rt0.hpp"

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hiermix {

Eigen::Matrix3d pullback_a_table(const AffineMap& map, const Mat2& K) {
  const Mat2 W = map.pullback_tensor(K);
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  for (int q = 0; q < 3; ++q) {
    const Vec2 xq = rt0::edge_midpoint(q);
    Vec2 v[3];
    for (int m = 0; m < 3; ++m) v[m] = rt0::basis(m, xq);
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n) a(m, n) += v[m].dot(W * v[n]);
  }
  // midpoint rule weight |Tref|/3 = sqrt(3)/3, then the J/4 prefactor
  a *= (rt0::kSqrt3 / 3.0) * (map.J / 4.0);
  return a;
}

Eigen::Matrix3d local_a1(const AffineMap& map, const Mat2& K, const double l[3]) {
  const Eigen::Matrix3d a = pullback_a_table(map, K);
  Eigen::Matrix3d out;
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) out(m, n) = l[m] * l[n] * a(m, n);
  return out;
}

SystemMatrices assemble_system(const HierMesh& mesh, const PermeabilityField& K) {
  const DofCounts& dc = mesh.dof_counts();
  const int ns = mesh.num_subdomains();

  SystemMatrices sys;
  sys.A2 = Vector::Zero(dc.n_velocity);
  sys.area = Vector::Zero(dc.n_pressure);

  std::vector<std::vector<Triplet>> a1_trip(ns), b_trip(ns);

#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (int k = 0; k < ns; ++k) {
    const SubdomainGrid& g = mesh.subdomain(k);
    const bool const_k = K.constant_on(k);
    Eigen::Matrix3d shared;
    if (const_k) shared = local_a1(g.up_map, K.at(k, g.up_map.b), g.l);

    auto& a1 = a1_trip[k];
    auto& bt = b_trip[k];
    a1.reserve(static_cast<size_t>(g.n_elems) * 9);
    bt.reserve(static_cast<size_t>(g.n_elems) * 3);
    for (int e = g.elem_offset; e < g.elem_offset + g.n_elems; ++e) {
      const ElemInfo& info = mesh.element(e);
      const Eigen::Matrix3d loc =
          const_k ? shared
                  : local_a1(g.up_map, K.at(k, mesh.element_centroid(e)), g.l);
      const double sign = mesh.orientation_sign(e);
      for (int m = 0; m < 3; ++m) {
        for (int n = 0; n < 3; ++n)
          a1.emplace_back(info.dof[m], info.dof[n], loc(m, n));
        bt.emplace_back(e, info.dof[m], sign * g.l[m]);
      }
    }
  }

  std::vector<Triplet> a1_all, b_all;
  for (int k = 0; k < ns; ++k) {
    a1_all.insert(a1_all.end(), a1_trip[k].begin(), a1_trip[k].end());
    b_all.insert(b_all.end(), b_trip[k].begin(), b_trip[k].end());
  }
  sys.A1.resize(dc.n_velocity, dc.n_velocity);
  sys.A1.setFromTriplets(a1_all.begin(), a1_all.end());
  sys.B.resize(dc.n_pressure, dc.n_velocity);
  sys.B.setFromTriplets(b_all.begin(), b_all.end());

  std::vector<Triplet> c_trip;
  for (int d = 0; d < dc.n_velocity; ++d) {
    const VelocityDof& dof = mesh.dof(d);
    const int e_up = dof.elem_up, e_dn = dof.elem_down;
    if (e_up >= 0) sys.A2[d] += (rt0::kSqrt3 / 6.0) * dof.length * dof.length;
    if (e_dn >= 0) sys.A2[d] += (rt0::kSqrt3 / 6.0) * dof.length * dof.length;
    if (dof.lambda >= 0) c_trip.emplace_back(d, dof.lambda, dof.length);
  }
  sys.C.resize(dc.n_velocity, dc.n_multiplier);
  sys.C.setFromTriplets(c_trip.begin(), c_trip.end());

  for (int e = 0; e < dc.n_pressure; ++e) sys.area[e] = mesh.element_area(e);

  sys.E = sys.A1;
  for (int row = 0; row < sys.E.outerSize(); ++row)
    for (SpMat::InnerIterator it(sys.E, row); it; ++it)
      it.valueRef() /= sys.A2[it.row()] * sys.A2[it.col()];

  return sys;
}

namespace {

// Copies a (row range, col range) window of S into a standalone matrix.
SpMat window(const SpMat& S, int r0, int nr, int c0, int nc) {
  std::vector<Triplet> t;
  for (int r = r0; r < r0 + nr; ++r)
    for (SpMat::InnerIterator it(S, r); it; ++it)
      if (it.col() >= c0 && it.col() < c0 + nc)
        t.emplace_back(it.row() - r0, it.col() - c0, it.value());
  SpMat out(nr, nc);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

void append_shifted(std::vector<Triplet>& dst, const SpMat& S, int dr, int dc) {
  for (int r = 0; r < S.outerSize(); ++r)
    for (SpMat::InnerIterator it(S, r); it; ++it)
      dst.emplace_back(it.row() + dr, it.col() + dc, it.value());
}

}  // namespace

SchurBlocks schur_blocks(const HierMesh& mesh, const SystemMatrices& sys) {
  const DofCounts& dc = mesh.dof_counts();
  const int ns = mesh.num_subdomains();

  SchurBlocks out;
  out.M_block.resize(ns);
  std::vector<SpMat> q_k(ns), n_k(ns), be_k(ns), cte_k(ns);

#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (int k = 0; k < ns; ++k) {
    const SubdomainGrid& g = mesh.subdomain(k);
    const SpMat Ek = window(sys.E, g.dof_offset, g.n_edges, g.dof_offset, g.n_edges);
    const SpMat Bk = window(sys.B, g.elem_offset, g.n_elems, g.dof_offset, g.n_edges);
    const SpMat Ck =
        window(sys.C, g.dof_offset, g.n_edges, 0, dc.n_multiplier);
    const SpMat BEk = Bk * Ek;
    const SpMat CtEk = SpMat(Ck.transpose()) * Ek;
    out.M_block[k] = SpMat(BEk * SpMat(Bk.transpose()));
    q_k[k] = SpMat(-BEk * Ck);
    n_k[k] = SpMat(CtEk * Ck);
    be_k[k] = BEk;
    cte_k[k] = CtEk;
  }

  std::vector<Triplet> m_t, q_t, n_t, be_t, cte_t;
  for (int k = 0; k < ns; ++k) {
    const SubdomainGrid& g = mesh.subdomain(k);
    append_shifted(m_t, out.M_block[k], g.elem_offset, g.elem_offset);
    append_shifted(q_t, q_k[k], g.elem_offset, 0);
    append_shifted(n_t, n_k[k], 0, 0);
    append_shifted(be_t, be_k[k], g.elem_offset, g.dof_offset);
    append_shifted(cte_t, cte_k[k], 0, g.dof_offset);
  }
  out.M.resize(dc.n_pressure, dc.n_pressure);
  out.M.setFromTriplets(m_t.begin(), m_t.end());
  out.N.resize(dc.n_multiplier, dc.n_multiplier);
  out.N.setFromTriplets(n_t.begin(), n_t.end());
  out.Q.resize(dc.n_pressure, dc.n_multiplier);
  out.Q.setFromTriplets(q_t.begin(), q_t.end());
  out.BE.resize(dc.n_pressure, dc.n_velocity);
  out.BE.setFromTriplets(be_t.begin(), be_t.end());
  out.CtE.resize(dc.n_multiplier, dc.n_velocity);
  out.CtE.setFromTriplets(cte_t.begin(), cte_t.end());
  return out;
}

RhsAssembler::RhsAssembler(const HierMesh& mesh, const SchurBlocks& blocks,
                           ScalarFn source, ScalarFn dirichlet, ScalarFn neumann)
    : mesh_(mesh),
      blocks_(blocks),
      source_(std::move(source)),
      dirichlet_(std::move(dirichlet)),
      neumann_(std::move(neumann)) {
  for (int d = 0; d < mesh_.dof_counts().n_velocity; ++d) {
    const VelocityDof& dof = mesh_.dof(d);
    if (dof.cls == EdgeClass::DirichletBoundary) dirichlet_dofs_.push_back(d);
    if (dof.cls == EdgeClass::NeumannBoundary)
      neumann_edges_.emplace_back(dof.lambda, d);
  }
}

Vector RhsAssembler::F(double t) const {
  const int nw = mesh_.dof_counts().n_pressure;
  Vector f = Vector::Zero(nw);
#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (int e = 0; e < nw; ++e) {
    const ElemInfo& info = mesh_.element(e);
    double acc = 0;
    for (int m = 0; m < 3; ++m) {
      const Vec2& x = mesh_.dof(info.dof[m]).midpoint;
      acc += source_(x.x(), x.y(), t);
    }
    f[e] = acc / 3.0;
  }
  return f;
}

Vector RhsAssembler::Ghd(double t) const {
  Vector g = Vector::Zero(mesh_.dof_counts().n_velocity);
  if (!dirichlet_) return g;
  for (int d : dirichlet_dofs_) {
    const VelocityDof& dof = mesh_.dof(d);
    g[d] = simpson_edge(dof.a, dof.b,
                             [&](const Vec2& x) { return dirichlet_(x.x(), x.y(), t); });
  }
  return g;
}

Vector RhsAssembler::Ghn(double t) const {
  Vector g = Vector::Zero(mesh_.dof_counts().n_multiplier);
  if (!neumann_) return g;
  for (auto [lam, d] : neumann_edges_) {
    const VelocityDof& dof = mesh_.dof(d);
    g[lam] = -simpson_edge(
        dof.a, dof.b, [&](const Vec2& x) { return neumann_(x.x(), x.y(), t); });
  }
  return g;
}

RhsAssembler::Sample RhsAssembler::at(double t) const {
  const Vector ghd = Ghd(t);
  Sample s;
  s.S = F(t);
  for (int e = 0; e < s.S.size(); ++e) s.S[e] *= mesh_.element_area(e);
  s.S += blocks_.BE * ghd;
  s.T = Ghn(t) - blocks_.CtE * ghd;
  return s;
}

Vector initial_pressure(const HierMesh& mesh,
                        const std::function<double(double, double)>& p0) {
  const int nw = mesh.dof_counts().n_pressure;
  Vector p = Vector::Zero(nw);
  for (int e = 0; e < nw; ++e) {
    const ElemInfo& info = mesh.element(e);
    double acc = 0;
    for (int m = 0; m < 3; ++m) {
      const Vec2& x = mesh.dof(info.dof[m]).midpoint;
      acc += p0(x.x(), x.y());
    }
    p[e] = acc / 3.0;
  }
  return p;
}

Vector recover_flux(const SystemMatrices& sys, const Vector& Ghd, const Vector& P,
                    const Vector& Lambda) {
  Vector rhs = sys.B.transpose() * P - Ghd;
  if (Lambda.size() > 0) rhs -= sys.C * Lambda;
  return sys.E * rhs;
}

}  // namespace hiermix
