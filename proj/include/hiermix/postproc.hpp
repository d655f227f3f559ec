#pragma once

#include "hiermix/cn_solver.hpp"
#include "hiermix/hier_mesh.hpp"

#include <functional>
#include <vector>

namespace hiermix {

/// Local least-squares velocity reconstruction.  On each element a linear
/// vector field (a x + b y + c, d x + e y + f) is fitted to the normal flux
/// values of the element's own edges and the outer edges of its edge
/// neighbours (up to nine conditions, fewer next to the boundary).  The fit
/// crosses interfaces.  Next to the outer boundary the available conditions
/// do not determine all six coefficients (a seven-condition set on this
/// lattice has rank five); there the fit still matches every available flux
/// and the undetermined directions fall back to the element's lowest-order
/// velocity.  The geometry factor of every fit is computed once per mesh;
/// applying it to a flux vector is a small dense product per element.
class FluxPostprocessor {
 public:
  explicit FluxPostprocessor(const HierMesh& mesh);

  using Coef = Eigen::Matrix<double, 6, 1>;

  /// Row e holds the six coefficients of element e.
  Eigen::MatrixXd reconstruct(const Vector& U) const;

  static Vec2 eval(const Eigen::Ref<const Eigen::RowVectorXd>& coef, const Vec2& x) {
    return Vec2(coef[0] * x.x() + coef[1] * x.y() + coef[2],
                coef[3] * x.x() + coef[4] * x.y() + coef[5]);
  }

  /// Number of elements whose fit is rank deficient (anchored cells).
  int fallback_count() const { return fallback_count_; }

 private:
  struct ElemFit {
    Eigen::MatrixXd pinv;               // 6 x m least-squares factor
    Eigen::Matrix<double, 6, 6> keep;   // projector onto the unfitted directions
    std::vector<int> dofs;              // m participating flux dofs
    bool rank_ok = false;
  };

  Coef lowest_order_coef(int e, const Vector& U) const;

  const HierMesh& mesh_;
  std::vector<ElemFit> fits_;
  int fallback_count_ = 0;
};

struct ExactSolution {
  std::function<double(double, double, double)> p;
  std::function<Vec2(double, double, double)> u;
};

/// Discrete error norms, maximized over the observed time levels:
///   p_l2:    area-weighted l2 of cell pressure errors at cell centroids
///   p_max:   largest cell pressure error
///   flux_l2: root mean square of normal flux errors at edge midpoints
///   post_l2: piecewise L2 (one-point centroid rule) of the reconstructed
///            velocity error
struct ErrorNorms {
  double p_l2 = 0;
  double p_max = 0;
  double flux_l2 = 0;
  double post_l2 = 0;
};

class ErrorAccumulator {
 public:
  ErrorAccumulator(const HierMesh& mesh, const ExactSolution& exact,
                   const FluxPostprocessor* post = nullptr);

  /// Folds the state at st.t into the running maxima.
  void observe(const CnSolver::State& st);

  const ErrorNorms& norms() const { return norms_; }

 private:
  const HierMesh& mesh_;
  ExactSolution exact_;
  const FluxPostprocessor* post_;
  ErrorNorms norms_;
};

/// log2(coarse / fine); the order observed between two refinement levels.
double observed_order(double coarse, double fine);

}  // namespace hiermix
