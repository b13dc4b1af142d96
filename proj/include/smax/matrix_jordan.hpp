#pragma once

#include <span>
#include <utility>
#include <vector>

#include "smax/core.hpp"
#include "smax/factorization.hpp"
#include "smax/generators.hpp"
#include "smax/poly.hpp"

namespace smax {

struct EigenBlocks {
  cplx lambda;
  std::vector<int> blocks;  // Jordan block sizes m_j1, ..., m_jq
};

/// Declared Jordan structure P X P^{-1} = Diag(B, J_1, ..., J_m).
///
/// Eigenvalue regions follow declaration order after the (possibly empty) inactive block B.
/// Jordan blocks are upper: lambda on the diagonal, ones on the superdiagonal.
class JordanSpec {
 public:
  JordanSpec() = default;
  // P defaults to the identity; B defaults to empty. Throws ArgumentError/DomainError.
  explicit JordanSpec(std::vector<EigenBlocks> eigs, CMatrix P = CMatrix(), CMatrix B = CMatrix());
  // From a matrix with simple eigenvalues separated by more than min_sep.
  static JordanSpec diagonalizable(const CMatrix& X, double min_sep = 1e-4);

  static constexpr double kMaxCond = 1e8;

  int n() const { return n_; }
  int n0() const { return static_cast<int>(B_.rows()); }
  int count() const { return static_cast<int>(eigs_.size()); }
  const std::vector<EigenBlocks>& eigs() const { return eigs_; }
  cplx lambda(int j) const { return eigs_.at(j).lambda; }
  int alg(int j) const { return alg_.at(j); }
  int geo(int j) const { return static_cast<int>(eigs_.at(j).blocks.size()); }
  int max_block(int j) const;
  bool nonderogatory(int j) const { return geo(j) == 1; }
  bool all_nonderogatory() const;
  int offset(int j) const { return off_.at(j); }
  int block_offset(int j, int k) const;

  const CMatrix& P() const { return P_; }
  const CMatrix& P_inv() const { return Pinv_; }
  const CMatrix& B() const { return B_; }
  double cond_P() const { return cond_; }
  std::vector<cplx> B_eigenvalues() const;

  CMatrix J() const;
  CMatrix X() const { return Pinv_ * J() * P_; }
  CMatrix to_W(const CMatrix& Y) const { return Pinv_.adjoint() * Y * P_.adjoint(); }
  CMatrix from_W(const CMatrix& W) const { return P_.adjoint() * W * Pinv_.adjoint(); }
  CMatrix to_V(const CMatrix& Z) const { return P_ * Z * Pinv_; }
  CMatrix from_V(const CMatrix& V) const { return Pinv_ * V * P_; }
  // Same spec with P replaced by Pi * P for a row permutation perm (new row r = old row perm[r]).
  JordanSpec permuted(const std::vector<EigenBlocks>& eigs, const CMatrix& B,
                      const std::vector<int>& perm) const;

 private:
  std::vector<EigenBlocks> eigs_;
  CMatrix P_, Pinv_, B_;
  std::vector<int> alg_, off_;
  int n_ = 0;
  double cond_ = 1.0;
};

CMatrix synth(const JordanSpec& spec);

// Faddeev-LeVerrier.
Poly char_poly(const CMatrix& X);

// Derivative of the characteristic polynomial at spec.X() in direction Z (B must be empty).
Poly char_poly_deriv_action(const JordanSpec& spec, const CMatrix& Z);

// det(xi I - J_n - sum_s lam_s (J_n^T)^s) for the nilpotent Jordan block J_n, by recursion.
cplx jordan_perturbed_det(int n, std::span<const cplx> lam, cplx xi);
// max over xi of |det - (xi^n - sum_s (n-s) lam_s xi^{n-s-1})| / ||lam||.
double det_expansion_residual(int n, std::span<const cplx> lam, std::span<const cplx> xi_grid);

// (n_j - s)^{-1} P^* J_js^* P^{-*} for nonderogatory eigenvalue j, s = 0..n_j-1.
CMatrix lambda_grad(const JordanSpec& spec, int j, int s);

// Derivative of the local characteristic factor at eigenvalue j (degree < n_j) and its adjoint.
Poly g_prime_action(const JordanSpec& spec, int j, const CMatrix& Z);
CMatrix g_prime_adjoint(const JordanSpec& spec, int j, const Poly& h);

struct ActiveFactor {
  double value = 0.0;
  RootCluster ptilde;          // active eigenvalues, lexicographic order
  JordanSpec spec;             // active eigenvalues only; the rest moved into B
  std::vector<int> active;     // indices into the original spec, declaration order
  std::vector<int> root_of;    // root_of[k]: index in ptilde of spec eigenvalue k
};

ActiveFactor active_factor(const JordanSpec& spec, const Generator& f, double tol = kActiveTol);

// R(v) = (v_0, -sum v_js P^* J_js^* P^{-*}); v.blocks[j][s] = v_js in declaration order.
std::pair<cplx, CMatrix> R_apply(const JordanSpec& spec, const BlockVector& v);

struct RangeFit {
  BlockVector v;        // head is zero
  double residual = 0;  // Frobenius residual in W coordinates
};
// Least-squares preimage of (0, Y) under R.
RangeFit R_range_fit(const JordanSpec& spec, const CMatrix& Y);

// Eigenvalues of X in lexicographic order.
std::vector<cplx> eigenvalues(const CMatrix& X);

}  // namespace smax
