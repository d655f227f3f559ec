#include "hiermix/postproc.hpp"

#include "hiermix/parallel.hpp"
#include "hiermix/rt0.hpp"

#include <Eigen/QR>

#include <cmath>

namespace hiermix {

FluxPostprocessor::FluxPostprocessor(const HierMesh& mesh) : mesh_(mesh) {
  const int nw = mesh.num_elements();
  fits_.resize(nw);
  for (int e = 0; e < nw; ++e) {
    const ElemInfo& info = mesh.element(e);
    std::vector<int> rows;
    for (int m = 0; m < 3; ++m) rows.push_back(info.dof[m]);
    for (int m = 1; m <= 3; ++m) {
      const int nb = mesh.neighbor_element(e, m);
      if (nb < 0) continue;
      const int shared = mesh.dof(info.dof[m - 1]).geom_edge;
      const ElemInfo& ninfo = mesh.element(nb);
      for (int q = 0; q < 3; ++q) {
        const int d = ninfo.dof[q];
        if (mesh.dof(d).geom_edge == shared) continue;
        rows.push_back(d);
      }
    }

    const int nr = static_cast<int>(rows.size());
    Eigen::MatrixXd A(nr, 6);
    for (int r = 0; r < nr; ++r) {
      const VelocityDof& d = mesh.dof(rows[r]);
      const Vec2& x = d.midpoint;
      const Vec2& n = d.normal;
      A.row(r) << x.x() * n.x(), x.y() * n.x(), n.x(), x.x() * n.y(),
          x.y() * n.y(), n.y();
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    ElemFit& fit = fits_[e];
    fit.dofs = std::move(rows);
    fit.rank_ok = cod.rank() >= 6;
    fit.pinv = cod.pseudoInverse();
    if (!fit.rank_ok) {
      // Minimum-norm factor plus the projector that anchors the unfitted
      // directions to the lowest-order field.
      fit.keep = Eigen::Matrix<double, 6, 6>::Identity() - fit.pinv * A;
      ++fallback_count_;
    }
  }
}

FluxPostprocessor::Coef FluxPostprocessor::lowest_order_coef(int e,
                                                             const Vector& U) const {
  const ElemInfo& info = mesh_.element(e);
  const auto v = mesh_.element_vertices(e);
  const AffineMap map = AffineMap::from_vertices(v[0], v[1], v[2]);
  const double sign = mesh_.orientation_sign(e);

  // RT0 fields are r x + a; r from the divergence, a from the centroid value.
  const Vec2 chat = rt0::centroid();
  double r = 0;
  Vec2 ucent = Vec2::Zero();
  for (int m = 0; m < 3; ++m) {
    const VelocityDof& d = mesh_.dof(info.dof[m]);
    const double c = sign * U[info.dof[m]] * d.length / 2.0;
    r += c / (rt0::kSqrt3 * map.J);
    ucent += c * (map.B * rt0::basis(m, chat)) / map.J;
  }
  const Vec2 a = ucent - r * map.to_physical(chat);
  Coef coef;
  coef[0] = coef[4] = r;
  coef[1] = coef[3] = 0.0;
  coef[2] = a.x();
  coef[5] = a.y();
  return coef;
}

Eigen::MatrixXd FluxPostprocessor::reconstruct(const Vector& U) const {
  const int nw = mesh_.num_elements();
  Eigen::MatrixXd R(nw, 6);
#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (int e = 0; e < nw; ++e) {
    const ElemFit& fit = fits_[e];
    Vector u(fit.dofs.size());
    for (size_t r = 0; r < fit.dofs.size(); ++r) u[r] = U[fit.dofs[r]];
    Coef coef = fit.pinv * u;
    if (!fit.rank_ok) coef += fit.keep * lowest_order_coef(e, U);
    R.row(e) = coef.transpose();
  }
  return R;
}

ErrorAccumulator::ErrorAccumulator(const HierMesh& mesh, const ExactSolution& exact,
                                   const FluxPostprocessor* post)
    : mesh_(mesh), exact_(exact), post_(post) {}

void ErrorAccumulator::observe(const CnSolver::State& st) {
  const double t = st.t;
  double p_sq = 0, p_max = 0;
  for (int e = 0; e < mesh_.num_elements(); ++e) {
    const Vec2 c = mesh_.element_centroid(e);
    const double err = st.P[e] - exact_.p(c.x(), c.y(), t);
    p_sq += mesh_.element_area(e) * err * err;
    p_max = std::max(p_max, std::abs(err));
  }
  norms_.p_l2 = std::max(norms_.p_l2, std::sqrt(p_sq));
  norms_.p_max = std::max(norms_.p_max, p_max);

  if (exact_.u) {
    double f_sq = 0;
    const int nv = mesh_.num_velocity_dofs();
    for (int d = 0; d < nv; ++d) {
      const VelocityDof& dof = mesh_.dof(d);
      const Vec2 ue = exact_.u(dof.midpoint.x(), dof.midpoint.y(), t);
      const double err = ue.dot(dof.normal) - st.U[d];
      f_sq += err * err;
    }
    norms_.flux_l2 = std::max(norms_.flux_l2, std::sqrt(f_sq / nv));

    if (post_) {
      const Eigen::MatrixXd R = post_->reconstruct(st.U);
      double q_sq = 0;
      for (int e = 0; e < mesh_.num_elements(); ++e) {
        const Vec2 c = mesh_.element_centroid(e);
        const Vec2 err =
            exact_.u(c.x(), c.y(), t) - FluxPostprocessor::eval(R.row(e), c);
        q_sq += mesh_.element_area(e) * err.squaredNorm();
      }
      norms_.post_l2 = std::max(norms_.post_l2, std::sqrt(q_sq));
    }
  }
}

double observed_order(double coarse, double fine) {
  return std::log2(coarse / fine);
}

}  // namespace hiermix
