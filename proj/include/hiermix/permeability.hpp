#pragma once

#include "hiermix/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace hiermix {

/// Symmetric positive definite permeability tensor field, evaluated per
/// element (at the centroid for spatially varying fields).  Subdomains with a
/// constant tensor are flagged so assembly can compute one local matrix and
/// replicate it.
class PermeabilityField {
 public:
  static PermeabilityField uniform(const Mat2& K) {
    PermeabilityField f;
    f.uniform_ = K;
    f.mode_ = Mode::Uniform;
    return f;
  }

  static PermeabilityField per_subdomain(std::vector<Mat2> tensors) {
    PermeabilityField f;
    f.per_sub_ = std::move(tensors);
    f.mode_ = Mode::PerSubdomain;
    return f;
  }

  /// Spatially varying field; no subdomain is treated as constant.
  static PermeabilityField varying(std::function<Mat2(int, const Vec2&)> fn) {
    PermeabilityField f;
    f.fn_ = std::move(fn);
    f.mode_ = Mode::Varying;
    return f;
  }

  Mat2 at(int subdomain, const Vec2& centroid) const {
    switch (mode_) {
      case Mode::Uniform: return uniform_;
      case Mode::PerSubdomain: return per_sub_.at(subdomain);
      default: return fn_(subdomain, centroid);
    }
  }

  bool constant_on(int subdomain) const {
    (void)subdomain;
    return mode_ != Mode::Varying;
  }

  /// Throws ValidationError unless K is symmetric positive definite.
  static void check_spd(const Mat2& K);

 private:
  enum class Mode { Uniform, PerSubdomain, Varying };
  Mode mode_ = Mode::Uniform;
  Mat2 uniform_ = Mat2::Identity();
  std::vector<Mat2> per_sub_;
  std::function<Mat2(int, const Vec2&)> fn_;
};

inline void PermeabilityField::check_spd(const Mat2& K) {
  const double scale = K.cwiseAbs().maxCoeff();
  if (std::abs(K(0, 1) - K(1, 0)) > 1e-12 * scale)
    throw ValidationError("permeability tensor is not symmetric");
  if (!(K(0, 0) > 0.0) || !(K.determinant() > 0.0))
    throw ValidationError("permeability tensor is not positive definite");
}

}  // namespace hiermix
