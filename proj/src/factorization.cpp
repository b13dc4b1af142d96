#include "smax/factorization.hpp"

#include <Eigen/LU>

namespace smax {
namespace {

void check_blocks(const RootCluster& pt, const std::vector<int>& sizes) {
  if (static_cast<int>(sizes.size()) != pt.size())
    throw ArgumentError("block count does not match the number of roots");
  for (int j = 0; j < pt.size(); ++j)
    if (sizes[j] != pt.mult[j]) throw ArgumentError("block size does not match the multiplicity");
}

void check_factor_point(const RootCluster& pt, const FactorPoint& q) {
  if (static_cast<int>(q.q.size()) != pt.size())
    throw ArgumentError("factor point has the wrong number of components");
  for (int j = 0; j < pt.size(); ++j)
    if (q.q[j].degree() >= pt.mult[j])
      throw ArgumentError("factor component degree must be below the multiplicity");
}

Poly cofactor(const RootCluster& pt, int j) {
  Poly r = Poly::monomial(0);
  for (int k = 0; k < pt.size(); ++k)
    if (k != j) r = r * elementary(pt.mult[k], pt.roots[k]);
  return r;
}

}  // namespace

BlockVector BlockVector::zeros(const RootCluster& rc) {
  BlockVector b;
  for (int m : rc.mult) b.blocks.emplace_back(m, 0.0);
  return b;
}

int BlockVector::dim() const {
  int d = 1;
  for (auto& b : blocks) d += static_cast<int>(b.size());
  return d;
}

std::vector<int> BlockVector::sizes() const {
  std::vector<int> s;
  for (auto& b : blocks) s.push_back(static_cast<int>(b.size()));
  return s;
}

CVector BlockVector::flatten() const {
  CVector x(dim());
  int k = 0;
  x(k++) = head;
  for (auto& b : blocks)
    for (cplx c : b) x(k++) = c;
  return x;
}

BlockVector BlockVector::unflatten(const CVector& x, const std::vector<int>& sizes) {
  BlockVector b;
  int k = 0;
  b.head = x(k++);
  for (int s : sizes) {
    b.blocks.emplace_back(s);
    for (int i = 0; i < s; ++i) b.blocks.back()[i] = x(k++);
  }
  if (k != x.size()) throw ArgumentError("unflatten: size mismatch");
  return b;
}

cplx pn_inner(const BlockVector& a, const BlockVector& b) {
  if (a.sizes() != b.sizes()) throw ArgumentError("pn_inner: block structure mismatch");
  return a.flatten().dot(b.flatten());
}

Poly F_apply(const RootCluster& pt, const FactorPoint& q) {
  check_factor_point(pt, q);
  Poly p = Poly::monomial(0, 1.0 + q.q0);
  for (int j = 0; j < pt.size(); ++j) p = p * (elementary(pt.mult[j], pt.roots[j]) + q.q[j]);
  return p.resized(pt.degree());
}

Poly F_deriv0(const RootCluster& pt, const FactorPoint& w) {
  check_factor_point(pt, w);
  Poly v = pt.to_poly() * w.q0;
  for (int j = 0; j < pt.size(); ++j) v += cofactor(pt, j) * w.q[j];
  return v.resized(pt.degree());
}

BlockVector poly_coords(const RootCluster& pt, const Poly& v) {
  const int n = pt.degree();
  if (v.degree() > n) throw ArgumentError("poly_coords: degree exceeds that of the base point");
  // Columns: pt, then r_j (z - lambda_j)^{n_j - s} for s = 1..n_j.
  CMatrix A(n + 1, n + 1);
  int col = 0;
  auto put = [&](const Poly& p) {
    for (int k = 0; k <= n; ++k) A(k, col) = p.coeff(k);
    ++col;
  };
  put(pt.to_poly());
  for (int j = 0; j < pt.size(); ++j) {
    Poly r = cofactor(pt, j);
    for (int s = 1; s <= pt.mult[j]; ++s) put(r * elementary(pt.mult[j] - s, pt.roots[j]));
  }
  CVector b(n + 1);
  for (int k = 0; k <= n; ++k) b(k) = v.coeff(k);
  Eigen::PartialPivLU<CMatrix> lu(A);
  CVector x = lu.solve(b);
  x += lu.solve(b - A * x);  // one refinement step
  double res = (A * x - b).norm();
  if (!(res <= 1e-9 * std::max(1.0, b.norm()) * std::max(1.0, A.norm())))
    throw SingularSystem("poly_coords: residual " + std::to_string(res) + " too large");
  std::vector<int> sizes(pt.mult.begin(), pt.mult.end());
  return BlockVector::unflatten(x, sizes);
}

Poly poly_from_coords(const RootCluster& pt, const BlockVector& c) {
  return F_deriv0(pt, T_inverse(pt, c));
}

BlockVector T_apply(const RootCluster& pt, const FactorPoint& u) {
  check_factor_point(pt, u);
  BlockVector c;
  c.head = u.q0;
  for (int j = 0; j < pt.size(); ++j) {
    int nj = pt.mult[j];
    auto t = taylor_shift(u.q[j].resized(nj - 1), pt.roots[j]);
    std::vector<cplx> blk(nj);
    for (int s = 1; s <= nj; ++s) blk[s - 1] = t[nj - s];
    c.blocks.push_back(std::move(blk));
  }
  return c;
}

FactorPoint T_inverse(const RootCluster& pt, const BlockVector& c) {
  check_blocks(pt, c.sizes());
  FactorPoint u;
  u.q0 = c.head;
  for (int j = 0; j < pt.size(); ++j) {
    int nj = pt.mult[j];
    std::vector<cplx> t(nj);
    for (int s = 1; s <= nj; ++s) t[nj - s] = c.blocks[j][s - 1];
    u.q.push_back(from_taylor(t, pt.roots[j]));
  }
  return u;
}

FactorPoint F_deriv0_inv(const RootCluster& pt, const Poly& v) {
  return T_inverse(pt, poly_coords(pt, v));
}

}  // namespace smax
