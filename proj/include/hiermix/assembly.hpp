#pragma once

#include "hiermix/hier_mesh.hpp"
#include "hiermix/permeability.hpp"
#include "hiermix/types.hpp"

#include <functional>

namespace hiermix {

/// Scalar data function of (x, y, t).
using ScalarFn = std::function<double(double, double, double)>;

/// Assembled operators of the expanded mixed system
///   [ A1 -A2  0   0  ] [Ut]   [ 0   ]
///   [-A2  0   B'  -C ] [U ] = [ Ghd ]
///   [ 0   B   0   0  ] [P ]   [ D F ] + time derivative
///   [ 0  -C'  0   0  ] [L ]   [ Ghn ]
/// A2 is diagonal by construction (vertex+center quadrature), so only its
/// diagonal is stored.  E = A2^{-1} A1 A2^{-1} is the kernel shared by all
/// Schur-complement blocks.  A1, A2 and E never couple subdomains.
struct SystemMatrices {
  SpMat A1;     // N_V x N_V
  Vector A2;    // diagonal of A2, N_V
  SpMat B;      // N_W x N_V, rows +-l_m (+ out of Up, - into Down)
  SpMat C;      // N_V x N_L, entry l on each side copy of a multiplier edge
  Vector area;  // diagonal of D, N_W
  SpMat E;      // A2^{-1} A1 A2^{-1}
};

/// Local contribution table a(m,n) = (J/4) int_ref vhat_m' Binv K Binv' vhat_n
/// (unscaled reference basis; exact via the degree-2 edge-midpoint rule).
/// Identical for Up and Down cells since their affine matrices differ by sign.
Eigen::Matrix3d pullback_a_table(const AffineMap& map, const Mat2& K);

/// Element matrix of A1: (A1_T)(m,n) = l_m l_n a(m,n).
Eigen::Matrix3d local_a1(const AffineMap& map, const Mat2& K, const double l[3]);

SystemMatrices assemble_system(const HierMesh& mesh, const PermeabilityField& K);

/// Schur complement blocks of the reduced (P, Lambda) system:
///   M = B E B',  N = C' E C,  Q = -B E C.
/// M is block diagonal over subdomains (at most 10 entries per row); N and Q
/// couple subdomains only through multiplier columns.
struct SchurBlocks {
  SpMat M;                     // N_W x N_W
  SpMat N;                     // N_L x N_L
  SpMat Q;                     // N_W x N_L
  std::vector<SpMat> M_block;  // diagonal blocks of M, one per subdomain
  SpMat BE;                    // B E, used by the right-hand side and mass checks
  SpMat CtE;                   // C' E
};

SchurBlocks schur_blocks(const HierMesh& mesh, const SystemMatrices& sys);

/// Time-dependent right-hand side data, reduced to the (P, Lambda) system:
///   S(t) = D F(t) + B E Ghd(t),   T(t) = Ghn(t) - C' E Ghd(t).
class RhsAssembler {
 public:
  RhsAssembler(const HierMesh& mesh, const SchurBlocks& blocks, ScalarFn source,
               ScalarFn dirichlet, ScalarFn neumann);

  /// Element averages of the source, (1/|T|)(f, w_T), edge-midpoint rule.
  Vector F(double t) const;
  /// Dirichlet data functional <g_D, v.n>, Simpson rule per boundary edge;
  /// zero except on Dirichlet dofs.  Dirichlet data enters only here.
  Vector Ghd(double t) const;
  /// Neumann data functional -<g_N, mu>, Simpson rule; zero except on
  /// Neumann multiplier edges.
  Vector Ghn(double t) const;

  struct Sample {
    Vector S;  // N_W
    Vector T;  // N_L
  };
  Sample at(double t) const;

 private:
  const HierMesh& mesh_;
  const SchurBlocks& blocks_;
  ScalarFn source_, dirichlet_, neumann_;
  std::vector<int> dirichlet_dofs_;
  std::vector<std::pair<int, int>> neumann_edges_;  // (lambda id, dof id)
};

/// Element averages of the initial pressure, (1/|T|)(p0, w_T).
Vector initial_pressure(const HierMesh& mesh,
                        const std::function<double(double, double)>& p0);

/// Velocity dofs from a (P, Lambda) state: U = E (B' P - C Lambda - Ghd).
Vector recover_flux(const SystemMatrices& sys, const Vector& Ghd, const Vector& P,
                    const Vector& Lambda);

}  // namespace hiermix
