#include "smax/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace smax {

Poly::Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
}

Poly Poly::zero(int degree_bound) {
  return Poly(std::vector<cplx>(static_cast<std::size_t>(std::max(degree_bound, 0)) + 1, 0.0));
}

Poly Poly::monomial(int k, cplx a) {
  Poly p = zero(k);
  p.c_[k] = a;
  return p;
}

int Poly::degree(double tol) const {
  for (int k = size() - 1; k >= 0; --k)
    if (std::abs(c_[k]) > tol) return k;
  return -1;
}

double Poly::max_abs_coeff() const {
  double m = 0;
  for (cplx c : c_) m = std::max(m, std::abs(c));
  return m;
}

cplx Poly::operator()(cplx z) const {
  cplx acc = 0;
  for (int k = size() - 1; k >= 0; --k) acc = acc * z + c_[k];
  return acc;
}

Poly Poly::derivative() const {
  if (size() == 1) return Poly();
  std::vector<cplx> d(size() - 1);
  for (int k = 1; k < size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Poly(std::move(d));
}

Poly Poly::resized(int degree_bound) const {
  if (degree() > degree_bound) throw ArgumentError("Poly::resized would drop nonzero coefficients");
  std::vector<cplx> c(degree_bound + 1, 0.0);
  for (int k = 0; k <= degree_bound && k < size(); ++k) c[k] = c_[k];
  return Poly(std::move(c));
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.size() > size()) c_.resize(o.size(), 0.0);
  for (int k = 0; k < o.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.size() > size()) c_.resize(o.size(), 0.0);
  for (int k = 0; k < o.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Poly& Poly::operator*=(cplx a) {
  for (auto& c : c_) c *= a;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  std::vector<cplx> c(a.size() + b.size() - 1, 0.0);
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(c));
}

Poly elementary(int l, cplx lambda0) {
  if (l < 0) throw ArgumentError("elementary: negative degree");
  Poly p = Poly::monomial(0);
  Poly lin(std::vector<cplx>{-lambda0, 1.0});
  for (int i = 0; i < l; ++i) p = p * lin;
  return p;
}

std::vector<cplx> taylor_shift(const Poly& p, cplx lambda0) {
  // Repeated synthetic division by (z - lambda0), accumulated in extended precision.
  using ld = std::complex<long double>;
  std::vector<ld> a;
  for (cplx c : p.coeffs()) a.emplace_back(c.real(), c.imag());
  const ld l0(lambda0.real(), lambda0.imag());
  int n = static_cast<int>(a.size()) - 1;
  for (int k = 0; k < n; ++k)
    for (int i = n - 1; i >= k; --i) a[i] += l0 * a[i + 1];
  std::vector<cplx> out;
  for (ld c : a) out.emplace_back(static_cast<double>(c.real()), static_cast<double>(c.imag()));
  return out;
}

cplx taylor_coeff(const Poly& p, int k, cplx lambda0) {
  if (k < 0) throw ArgumentError("taylor_coeff: negative order");
  if (k >= p.size()) return 0.0;
  return taylor_shift(p, lambda0)[k];
}

Poly from_taylor(std::span<const cplx> t, cplx lambda0) {
  // Horner in (z - lambda0).
  Poly acc = Poly::zero(static_cast<int>(t.size()) - 1);
  Poly lin(std::vector<cplx>{-lambda0, 1.0});
  for (int k = static_cast<int>(t.size()) - 1; k >= 0; --k) {
    acc = (acc * lin) + Poly::monomial(0, t[k]);
  }
  return acc.resized(std::max(static_cast<int>(t.size()) - 1, 0));
}

RootCluster RootCluster::make(std::vector<cplx> roots, std::vector<int> mult) {
  if (roots.size() != mult.size()) throw ArgumentError("RootCluster: size mismatch");
  std::vector<std::size_t> idx(roots.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return lex_less(roots[a], roots[b]); });
  RootCluster rc;
  for (auto i : idx) {
    if (mult[i] < 1) throw ArgumentError("RootCluster: multiplicities must be positive");
    if (!rc.roots.empty() && rc.roots.back() == roots[i])
      throw ArgumentError("RootCluster: repeated root");
    rc.roots.push_back(roots[i]);
    rc.mult.push_back(mult[i]);
  }
  return rc;
}

int RootCluster::degree() const { return std::accumulate(mult.begin(), mult.end(), 0); }

int RootCluster::max_mult() const {
  return mult.empty() ? 0 : *std::max_element(mult.begin(), mult.end());
}

Poly RootCluster::to_poly() const {
  Poly p = Poly::monomial(0);
  for (int j = 0; j < size(); ++j) p = p * elementary(mult[j], roots[j]);
  return p;
}

int RootCluster::index_of(cplx lambda, double tol) const {
  for (int j = 0; j < size(); ++j)
    if (std::abs(roots[j] - lambda) <= tol) return j;
  return -1;
}

namespace {

// Diagonal similarity scaling by powers of two (Parlett-Reinsch).
void balance(CMatrix& a) {
  const double radix = 2.0, sqrdx = radix * radix;
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0, c = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i).real()) + std::abs(a(j, i).imag());
        r += std::abs(a(i, j).real()) + std::abs(a(i, j).imag());
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0, s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace

std::vector<cplx> raw_roots(const Poly& p) {
  int n = p.degree();
  if (n < 0) throw ArgumentError("roots: zero polynomial");
  std::vector<cplx> out;
  if (n == 0) return out;
  cplx lead = p.coeff(n);
  CMatrix comp = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) comp(0, k) = -p.coeff(n - 1 - k) / lead;
  for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
  balance(comp);
  Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
  if (es.info() != Eigen::Success) throw DomainError("roots: eigenvalue iteration failed");
  for (int k = 0; k < n; ++k) out.push_back(es.eigenvalues()(k));
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return lex_less(a, b); });
  return out;
}

RootCluster roots(const Poly& p, double cluster_tol) {
  auto raw = raw_roots(p);
  // Agglomerative merging: closest pair first, as long as the merged diameter fits.
  std::vector<std::vector<cplx>> groups;
  for (cplx r : raw) groups.push_back({r});
  auto diameter = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double d = 0;
    for (cplx x : a)
      for (cplx y : b) d = std::max(d, std::abs(x - y));
    return d;
  };
  for (;;) {
    double best = kInf;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        double d = std::max({diameter(groups[i], groups[j]), diameter(groups[i], groups[i]),
                             diameter(groups[j], groups[j])});
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    if (groups.size() < 2 || best > cluster_tol) break;
    groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::vector<cplx> centers;
  std::vector<int> mult;
  for (auto& g : groups) {
    cplx s = 0;
    for (cplx x : g) s += x;
    centers.push_back(s / static_cast<double>(g.size()));
    mult.push_back(static_cast<int>(g.size()));
  }
  return RootCluster::make(std::move(centers), std::move(mult));
}

ActiveSet active_set(const RootCluster& rc, const Generator& f, double tol) {
  if (rc.size() == 0) throw ArgumentError("active_set: polynomial has no roots");
  ActiveSet as;
  as.cluster = rc;
  as.value = -kInf;
  std::vector<double> vals(rc.size());
  for (int j = 0; j < rc.size(); ++j) as.value = std::max(as.value, vals[j] = f.value(rc.roots[j]));
  for (int j = 0; j < rc.size(); ++j)
    (vals[j] >= as.value - tol ? as.active : as.inactive).push_back(j);
  return as;
}

ActiveSet active_set(const Poly& p, const Generator& f, double tol, double cluster_tol) {
  if (p.degree() < 1) throw ArgumentError("active_set: polynomial must be nonconstant");
  return active_set(roots(p, cluster_tol), f, tol);
}

double poly_root_max(const Poly& p, const Generator& f) {
  if (p.degree() < 1) throw ArgumentError("poly_root_max: polynomial must be nonconstant");
  double m = -kInf;
  for (cplx r : raw_roots(p)) m = std::max(m, f.value(r));
  return m;
}

}  // namespace smax
