#pragma once

#include <span>
#include <vector>

#include "smax/core.hpp"
#include "smax/generators.hpp"

namespace smax {

/// Complex polynomial; coefficient index equals the power.
class Poly {
 public:
  Poly() : c_{cplx(0.0)} {}
  explicit Poly(std::vector<cplx> coeffs);
  static Poly zero(int degree_bound);
  static Poly monomial(int k, cplx a = 1.0);

  // Highest index with |c| > tol, or -1 for the zero polynomial.
  int degree(double tol = 0.0) const;
  int size() const { return static_cast<int>(c_.size()); }
  cplx coeff(int k) const { return (k >= 0 && k < size()) ? c_[k] : cplx(0.0); }
  cplx& operator[](int k) { return c_.at(k); }
  std::span<const cplx> coeffs() const { return c_; }
  bool is_monic() const { int d = degree(); return d >= 0 && c_[d] == cplx(1.0); }
  double max_abs_coeff() const;

  cplx operator()(cplx z) const;
  Poly derivative() const;
  // Zero-padded or trimmed to exactly n+1 coefficients; trimming nonzeros throws.
  Poly resized(int degree_bound) const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(cplx a);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, cplx s) { return a *= s; }
  friend Poly operator*(cplx s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b);

 private:
  std::vector<cplx> c_;
};

// (z - lambda0)^l.
Poly elementary(int l, cplx lambda0);

// All Taylor coefficients of p at lambda0: result[k] = p^{(k)}(lambda0) / k!.
std::vector<cplx> taylor_shift(const Poly& p, cplx lambda0);
cplx taylor_coeff(const Poly& p, int k, cplx lambda0);
// Inverse of taylor_shift.
Poly from_taylor(std::span<const cplx> t, cplx lambda0);

/// Distinct roots in strict lexicographic order with multiplicities.
struct RootCluster {
  std::vector<cplx> roots;
  std::vector<int> mult;

  // Sorts into lexicographic order; rejects repeated roots and nonpositive multiplicities.
  static RootCluster make(std::vector<cplx> roots, std::vector<int> mult);
  int size() const { return static_cast<int>(roots.size()); }
  int degree() const;
  int max_mult() const;
  // Monic product of (z - lambda_j)^{n_j}.
  Poly to_poly() const;
  int index_of(cplx lambda, double tol = 0.0) const;
};

// Roots from eigenvalues of the balanced companion matrix, then greedy merging into
// clusters of diameter <= cluster_tol represented by their centroids.
RootCluster roots(const Poly& p, double cluster_tol = 1e-6);
// Raw (unclustered) roots in lexicographic order.
std::vector<cplx> raw_roots(const Poly& p);

inline constexpr double kActiveTol = 1e-8;

struct ActiveSet {
  double value = 0.0;
  RootCluster cluster;
  std::vector<int> active;   // indices into cluster
  std::vector<int> inactive;
};

ActiveSet active_set(const RootCluster& rc, const Generator& f, double tol = kActiveTol);
ActiveSet active_set(const Poly& p, const Generator& f, double tol = kActiveTol,
                     double cluster_tol = 1e-6);
double poly_root_max(const Poly& p, const Generator& f);

}  // namespace smax
