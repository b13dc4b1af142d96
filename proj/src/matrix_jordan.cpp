#include "smax/matrix_jordan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace smax {
namespace {

// Nilpotent part of the Jordan region of eigenvalue j (size n_j).
CMatrix region_nilpotent(const std::vector<int>& blocks) {
  int nj = std::accumulate(blocks.begin(), blocks.end(), 0);
  CMatrix N = CMatrix::Zero(nj, nj);
  int o = 0;
  for (int m : blocks) {
    for (int i = 0; i + 1 < m; ++i) N(o + i, o + i + 1) = 1.0;
    o += m;
  }
  return N;
}

CMatrix embed(const JordanSpec& spec, int j, const CMatrix& block) {
  CMatrix W = CMatrix::Zero(spec.n(), spec.n());
  W.block(spec.offset(j), spec.offset(j), spec.alg(j), spec.alg(j)) = block;
  return W;
}

CMatrix mat_power(const CMatrix& A, int s) {
  CMatrix R = CMatrix::Identity(A.rows(), A.cols());
  for (int i = 0; i < s; ++i) R = R * A;
  return R;
}

void require_nonderogatory(const JordanSpec& spec, int j, const char* who) {
  if (j < 0 || j >= spec.count()) throw ArgumentError(std::string(who) + ": eigenvalue index out of range");
  if (!spec.nonderogatory(j))
    throw DomainError(std::string(who) + ": eigenvalue must be nonderogatory");
}

}  // namespace

std::vector<cplx> eigenvalues(const CMatrix& X) {
  if (X.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMatrix> es(X, false);
  if (es.info() != Eigen::Success) throw DomainError("eigenvalue iteration failed");
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + X.rows());
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return lex_less(a, b); });
  return ev;
}

JordanSpec::JordanSpec(std::vector<EigenBlocks> eigs, CMatrix P, CMatrix B)
    : eigs_(std::move(eigs)), B_(std::move(B)) {
  if (B_.rows() != B_.cols()) throw ArgumentError("JordanSpec: B must be square");
  n_ = static_cast<int>(B_.rows());
  for (auto& e : eigs_) {
    if (e.blocks.empty()) throw ArgumentError("JordanSpec: eigenvalue without Jordan blocks");
    int a = 0;
    for (int m : e.blocks) {
      if (m < 1) throw ArgumentError("JordanSpec: Jordan block sizes must be positive");
      a += m;
    }
    off_.push_back(n_);
    alg_.push_back(a);
    n_ += a;
  }
  if (n_ == 0) throw ArgumentError("JordanSpec: empty structure");
  for (std::size_t i = 0; i < eigs_.size(); ++i)
    for (std::size_t k = i + 1; k < eigs_.size(); ++k)
      if (std::abs(eigs_[i].lambda - eigs_[k].lambda) <= 1e-10)
        throw ArgumentError("JordanSpec: declared eigenvalues must be distinct");
  for (cplx mu : B_eigenvalues())
    for (auto& e : eigs_)
      if (std::abs(mu - e.lambda) <= 1e-8)
        throw ArgumentError("JordanSpec: B shares an eigenvalue with a declared block");
  if (P.size() == 0) P = CMatrix::Identity(n_, n_);
  if (P.rows() != n_ || P.cols() != n_) throw ArgumentError("JordanSpec: P has the wrong size");
  P_ = std::move(P);
  Eigen::JacobiSVD<CMatrix> svd(P_);
  auto sv = svd.singularValues();
  double smin = sv(sv.size() - 1);
  cond_ = smin > 0 ? sv(0) / smin : kInf;
  if (!(cond_ <= kMaxCond)) throw DomainError("JordanSpec: P is too ill-conditioned");
  Eigen::PartialPivLU<CMatrix> lu(P_);
  Pinv_ = lu.inverse();
  Pinv_ += Pinv_ * (CMatrix::Identity(n_, n_) - P_ * Pinv_);
}

JordanSpec JordanSpec::diagonalizable(const CMatrix& X, double min_sep) {
  if (X.rows() != X.cols() || X.rows() == 0) throw ArgumentError("diagonalizable: X must be square");
  Eigen::ComplexEigenSolver<CMatrix> es(X, true);
  if (es.info() != Eigen::Success) throw DomainError("diagonalizable: eigenvalue iteration failed");
  const auto& ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    for (Eigen::Index k = i + 1; k < ev.size(); ++k)
      if (std::abs(ev(i) - ev(k)) <= min_sep)
        throw DomainError("diagonalizable: eigenvalues are not separated");
  std::vector<Eigen::Index> order(ev.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lex_less(ev(a), ev(b)); });
  CMatrix V(X.rows(), X.cols());
  std::vector<EigenBlocks> eigs;
  for (std::size_t k = 0; k < order.size(); ++k) {
    V.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(order[k]);
    eigs.push_back({ev(order[k]), {1}});
  }
  // X = V D V^{-1}, so P = V^{-1}.
  CMatrix P = Eigen::PartialPivLU<CMatrix>(V).inverse();
  return JordanSpec(std::move(eigs), std::move(P));
}

int JordanSpec::max_block(int j) const {
  const auto& b = eigs_.at(j).blocks;
  return *std::max_element(b.begin(), b.end());
}

bool JordanSpec::all_nonderogatory() const {
  for (int j = 0; j < count(); ++j)
    if (!nonderogatory(j)) return false;
  return true;
}

int JordanSpec::block_offset(int j, int k) const {
  int o = off_.at(j);
  for (int i = 0; i < k; ++i) o += eigs_.at(j).blocks.at(i);
  return o;
}

std::vector<cplx> JordanSpec::B_eigenvalues() const { return eigenvalues(B_); }

CMatrix JordanSpec::J() const {
  CMatrix J = CMatrix::Zero(n_, n_);
  if (n0() > 0) J.topLeftCorner(n0(), n0()) = B_;
  for (int j = 0; j < count(); ++j) {
    int o = off_[j];
    J.block(o, o, alg_[j], alg_[j]) = region_nilpotent(eigs_[j].blocks);
    for (int i = 0; i < alg_[j]; ++i) J(o + i, o + i) = eigs_[j].lambda;
  }
  return J;
}

JordanSpec JordanSpec::permuted(const std::vector<EigenBlocks>& eigs, const CMatrix& B,
                                const std::vector<int>& perm) const {
  CMatrix P(n_, n_);
  for (int r = 0; r < n_; ++r) P.row(r) = P_.row(perm.at(r));
  return JordanSpec(eigs, P, B);
}

CMatrix synth(const JordanSpec& spec) { return spec.X(); }

Poly char_poly(const CMatrix& X) {
  if (X.rows() != X.cols()) throw ArgumentError("char_poly: matrix must be square");
  const int n = static_cast<int>(X.rows());
  std::vector<cplx> c(n + 1, 0.0);
  c[n] = 1.0;
  CMatrix M = CMatrix::Zero(n, n);
  const CMatrix I = CMatrix::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    M = X * M + c[n - k + 1] * I;
    c[n - k] = -(X * M).trace() / static_cast<double>(k);
  }
  return Poly(std::move(c));
}

Poly g_prime_action(const JordanSpec& spec, int j, const CMatrix& Z) {
  if (j < 0 || j >= spec.count()) throw ArgumentError("g_prime_action: index out of range");
  if (Z.rows() != spec.n() || Z.cols() != spec.n()) throw ArgumentError("g_prime_action: Z has the wrong size");
  const int nj = spec.alg(j), o = spec.offset(j);
  CMatrix V = spec.to_V(Z).block(o, o, nj, nj);
  CMatrix N = region_nilpotent(spec.eigs()[j].blocks);
  std::vector<cplx> t(nj, 0.0);
  CMatrix Np = CMatrix::Identity(nj, nj);
  for (int l = 1; l <= spec.max_block(j); ++l) {
    t[nj - l] = -(Np * V).trace();
    Np = Np * N;
  }
  return from_taylor(t, spec.lambda(j));
}

Poly char_poly_deriv_action(const JordanSpec& spec, const CMatrix& Z) {
  if (spec.n0() != 0) throw ArgumentError("char_poly_deriv_action: every eigenvalue must be declared");
  Poly out = Poly::zero(spec.n());
  for (int j = 0; j < spec.count(); ++j) {
    Poly r = Poly::monomial(0);
    for (int k = 0; k < spec.count(); ++k)
      if (k != j) r = r * elementary(spec.alg(k), spec.lambda(k));
    out += r * g_prime_action(spec, j, Z);
  }
  return out.resized(spec.n());
}

cplx jordan_perturbed_det(int n, std::span<const cplx> lam, cplx xi) {
  if (n < 1 || static_cast<int>(lam.size()) != n) throw ArgumentError("jordan_perturbed_det: need n coefficients");
  auto a = [&](int s) { return s == 0 ? xi - lam[0] : -lam[s]; };
  std::vector<cplx> d(n + 1);
  d[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    cplx acc = a(k - 1);
    for (int i = 1; i < k; ++i) acc += a(k - 1 - i) * d[i];
    d[k] = acc;
  }
  return d[n];
}

double det_expansion_residual(int n, std::span<const cplx> lam, std::span<const cplx> xi_grid) {
  double nrm = 0;
  for (cplx l : lam) nrm += std::norm(l);
  nrm = std::sqrt(nrm);
  if (nrm == 0) throw ArgumentError("det_expansion_residual: lam must be nonzero");
  double worst = 0;
  for (cplx xi : xi_grid) {
    cplx lin = std::pow(xi, n);
    for (int s = 0; s < n; ++s) lin -= static_cast<double>(n - s) * lam[s] * std::pow(xi, n - s - 1);
    worst = std::max(worst, std::abs(jordan_perturbed_det(n, lam, xi) - lin));
  }
  return worst / nrm;
}

CMatrix lambda_grad(const JordanSpec& spec, int j, int s) {
  require_nonderogatory(spec, j, "lambda_grad");
  const int nj = spec.alg(j);
  if (s < 0 || s >= nj) throw ArgumentError("lambda_grad: s out of range");
  CMatrix Ns = mat_power(region_nilpotent(spec.eigs()[j].blocks), s);
  return spec.from_W(embed(spec, j, Ns.adjoint())) / static_cast<double>(nj - s);
}

CMatrix g_prime_adjoint(const JordanSpec& spec, int j, const Poly& h) {
  require_nonderogatory(spec, j, "g_prime_adjoint");
  const int nj = spec.alg(j);
  if (h.degree() >= nj) throw ArgumentError("g_prime_adjoint: degree must be below the multiplicity");
  auto t = taylor_shift(h.resized(nj - 1), spec.lambda(j));
  CMatrix N = region_nilpotent(spec.eigs()[j].blocks);
  CMatrix W = CMatrix::Zero(nj, nj);
  CMatrix Ns = CMatrix::Identity(nj, nj);
  for (int s = 0; s < nj; ++s) {
    W -= t[nj - s - 1] * Ns.adjoint();
    Ns = Ns * N;
  }
  return spec.from_W(embed(spec, j, W));
}

ActiveFactor active_factor(const JordanSpec& spec, const Generator& f, double tol) {
  ActiveFactor af;
  double vmax = -kInf, bmax = -kInf;
  for (int j = 0; j < spec.count(); ++j) vmax = std::max(vmax, f.value(spec.lambda(j)));
  for (cplx mu : spec.B_eigenvalues()) bmax = std::max(bmax, f.value(mu));
  if (spec.count() == 0) throw DomainError("active_factor: no active eigenvalue declared");
  if (bmax >= vmax - tol) throw DomainError("active_factor: an eigenvalue of B is active");
  af.value = vmax;
  std::vector<int> inactive;
  for (int j = 0; j < spec.count(); ++j)
    (f.value(spec.lambda(j)) >= vmax - tol ? af.active : inactive).push_back(j);

  // New layout: B, inactive regions, active regions.
  std::vector<int> perm;
  for (int r = 0; r < spec.n0(); ++r) perm.push_back(r);
  for (int j : inactive)
    for (int i = 0; i < spec.alg(j); ++i) perm.push_back(spec.offset(j) + i);
  int nB = static_cast<int>(perm.size());
  for (int j : af.active)
    for (int i = 0; i < spec.alg(j); ++i) perm.push_back(spec.offset(j) + i);
  CMatrix J = spec.J();
  CMatrix Bnew(nB, nB);
  for (int r = 0; r < nB; ++r)
    for (int c = 0; c < nB; ++c) Bnew(r, c) = J(perm[r], perm[c]);
  std::vector<EigenBlocks> eigs;
  std::vector<cplx> lams;
  std::vector<int> mult;
  for (int j : af.active) {
    eigs.push_back(spec.eigs()[j]);
    lams.push_back(spec.lambda(j));
    mult.push_back(spec.alg(j));
  }
  af.spec = spec.permuted(eigs, Bnew, perm);
  af.ptilde = RootCluster::make(lams, mult);
  for (cplx l : lams) af.root_of.push_back(af.ptilde.index_of(l));
  return af;
}

std::pair<cplx, CMatrix> R_apply(const JordanSpec& spec, const BlockVector& v) {
  if (static_cast<int>(v.blocks.size()) != spec.count()) throw ArgumentError("R_apply: block count mismatch");
  CMatrix W = CMatrix::Zero(spec.n(), spec.n());
  for (int j = 0; j < spec.count(); ++j) {
    require_nonderogatory(spec, j, "R_apply");
    const int nj = spec.alg(j), o = spec.offset(j);
    if (static_cast<int>(v.blocks[j].size()) != nj) throw ArgumentError("R_apply: block size mismatch");
    for (int s = 0; s < nj; ++s)
      for (int i = 0; i + s < nj; ++i) W(o + i + s, o + i) -= v.blocks[j][s];
  }
  return {v.head, spec.from_W(W)};
}

RangeFit R_range_fit(const JordanSpec& spec, const CMatrix& Y) {
  if (Y.rows() != spec.n() || Y.cols() != spec.n()) throw ArgumentError("R_range_fit: Y has the wrong size");
  CMatrix W = spec.to_W(Y);
  CMatrix fit = CMatrix::Zero(spec.n(), spec.n());
  RangeFit rf;
  for (int j = 0; j < spec.count(); ++j) {
    require_nonderogatory(spec, j, "R_range_fit");
    const int nj = spec.alg(j), o = spec.offset(j);
    std::vector<cplx> blk(nj);
    for (int s = 0; s < nj; ++s) {
      cplx mean = 0;
      for (int i = 0; i + s < nj; ++i) mean += W(o + i + s, o + i);
      mean /= static_cast<double>(nj - s);
      blk[s] = -mean;
      for (int i = 0; i + s < nj; ++i) fit(o + i + s, o + i) = mean;
    }
    rf.v.blocks.push_back(std::move(blk));
  }
  rf.residual = (W - fit).norm();
  return rf;
}

}  // namespace smax
