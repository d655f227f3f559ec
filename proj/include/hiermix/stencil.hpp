#pragma once

#include "hiermix/assembly.hpp"
#include "hiermix/hier_mesh.hpp"
#include "hiermix/permeability.hpp"

#include <array>
#include <optional>
#include <vector>

namespace hiermix {

/// Cell-centered coupling coefficients of M = B E B' on one refined
/// subdomain with constant permeability.  An interior cell couples to itself
/// and nine neighbours (ten nonzeros); the coefficients depend only on the
/// a-table of the subdomain, not on (i, j) and not on the refinement level.
///
/// Index convention: s[di + 1][dj + 1] multiplies the pressure at
/// (i + di, j + dj) of the indicated orientation.
struct StencilSet {
  Eigen::Matrix3d a;    // pullback table a(m, n) of the subdomain
  double uu[3][3];      // Up row, Up neighbours
  double ud[3][3];      // Up row, Down neighbours
  double du[3][3];      // Down row, Up neighbours
  double dd[3][3];      // Down row, Down neighbours
};

StencilSet stencil_coeffs(const SubdomainGrid& g, const Mat2& K);

/// True when every stencil neighbour of the cell exists inside the
/// subdomain, i.e. the row of M touches no boundary or interface edge.
bool stencil_interior(const SubdomainGrid& g, int i, int j, Orientation o);

/// One interior row of M in stencil form: ten (element, coefficient) pairs.
/// Pairs beyond the structural pattern are padded with column -1.
struct StencilRow {
  std::array<int, 10> col;
  std::array<double, 10> val;
};
StencilRow stencil_row(const HierMesh& mesh, int k, const StencilSet& s, int i,
                       int j, Orientation o);

/// Applies M through the stencils, falling back to the assembled rows for
/// cells next to a subdomain boundary (and for subdomains where the
/// permeability is not constant, which have no stencil).  Every output entry
/// is written by exactly one cell, so the result is independent of the
/// number of threads.
class StencilEngine {
 public:
  StencilEngine(const HierMesh& mesh, const PermeabilityField& K, const SpMat& M);

  bool has_stencil(int k) const { return sets_[k].has_value(); }
  const StencilSet& stencil(int k) const;

  void apply(const Vector& x, Vector& y) const;
  void apply_serial(const Vector& x, Vector& y) const;

 private:
  double row_value(const Vector& x, int e) const;

  const HierMesh& mesh_;
  const SpMat& M_;
  std::vector<std::optional<StencilSet>> sets_;
};

/// Largest relative discrepancy (scaled by the row's largest entry) between
/// the assembled interior rows of M and their stencil form.
double validate_stencils(const HierMesh& mesh, const StencilEngine& engine,
                         const SpMat& M);

}  // namespace hiermix
