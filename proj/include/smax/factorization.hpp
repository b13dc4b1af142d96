#pragma once

#include <vector>

#include "smax/core.hpp"
#include "smax/poly.hpp"

namespace smax {

/// Element of C x C^{n_1} x ... x C^{n_m}: a head scalar plus one block per root.
/// blocks[j][s] holds the (s+1)-th coordinate of block j.
struct BlockVector {
  cplx head = 0.0;
  std::vector<std::vector<cplx>> blocks;

  static BlockVector zeros(const RootCluster& rc);
  int dim() const;
  std::vector<int> sizes() const;
  CVector flatten() const;
  static BlockVector unflatten(const CVector& x, const std::vector<int>& sizes);
  double norm() const { return flatten().norm(); }
};

// Complex pairing conj(a) . b over all coordinates.
cplx pn_inner(const BlockVector& a, const BlockVector& b);

/// Point of the factorization space: head q0 and one polynomial of degree < n_j per root.
struct FactorPoint {
  cplx q0 = 0.0;
  std::vector<Poly> q;
};

// (1 + q0) * prod_j ((z - lambda_j)^{n_j} + q_j).
Poly F_apply(const RootCluster& pt, const FactorPoint& q);

// Derivative at 0: omega0 * pt + sum_j r_j w_j with r_j = pt / (z - lambda_j)^{n_j}.
Poly F_deriv0(const RootCluster& pt, const FactorPoint& w);

// Inverse of F_deriv0 via dense LU with a residual check (throws SingularSystem).
FactorPoint F_deriv0_inv(const RootCluster& pt, const Poly& v);

// Taylor coordinates: block j is (tau_{n_j-1}(u_j), ..., tau_0(u_j)) at lambda_j.
BlockVector T_apply(const RootCluster& pt, const FactorPoint& u);
FactorPoint T_inverse(const RootCluster& pt, const BlockVector& c);

// T(F'(0)^{-1} v) and its inverse.
BlockVector poly_coords(const RootCluster& pt, const Poly& v);
Poly poly_from_coords(const RootCluster& pt, const BlockVector& c);

}  // namespace smax
