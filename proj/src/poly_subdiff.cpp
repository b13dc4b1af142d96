#include "smax/poly_subdiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace smax {
namespace {

void check_shape(const RootCluster& pt, const BlockVector& c) {
  if (c.sizes() != pt.mult) throw ArgumentError("coordinate blocks do not match the root cluster");
}

Condition require_condition(const Generator& f, cplx lambda) {
  auto s = f.subdiff(lambda);
  if (s.is_zero()) throw DomainError("subdifferential is {0} at an active root");
  Condition cond = condition_check(f, lambda);
  if (cond == Condition::neither)
    throw UnsupportedGenerator("generator '" + f.name() + "' satisfies neither structural condition");
  return cond;
}

double block_max_abs(const std::vector<cplx>& b, std::size_t from = 0) {
  double m = 0;
  for (std::size_t i = from; i < b.size(); ++i) m = std::max(m, std::abs(b[i]));
  return m;
}

}  // namespace

DpReport dp_check(const RootCluster& pt, const Generator& f, const BlockVector& c, double tol,
                  double active_tol) {
  check_shape(pt, c);
  auto as = active_set(pt, f, active_tol);
  DpReport rep;
  rep.gamma.assign(pt.size(), 0.0);
  auto fail = [&](std::string why) {
    rep.member = false;
    rep.reason = std::move(why);
    return rep;
  };
  if (std::abs(c.head) > tol) return fail("head coordinate nonzero");
  for (int j : as.inactive)
    if (block_max_abs(c.blocks[j]) > tol) return fail("inactive block " + std::to_string(j) + " nonzero");

  std::vector<double> lo(pt.size(), 0.0), hi(pt.size(), 0.0);
  for (int j : as.active) {
    const cplx lam = pt.roots[j];
    const int nj = pt.mult[j];
    const double n = nj;
    Condition cond = require_condition(f, lam);
    ConvexSet2D S = f.subdiff(lam);
    const cplx x = -n * c.blocks[j][0];
    double a = 0.0, b = kInf;
    if (S.is_singleton()) {
      // dist(x, gamma g) <= n tol.
      cplx g = S.vertices().front();
      double g2 = std::norm(g);
      double gs = rdot(g, x) / g2;
      double res = std::abs(x - gs * g);
      double slack = n * tol;
      if (res > slack) return fail("first coordinate of block " + std::to_string(j) + " off the ray");
      double d = std::sqrt(slack * slack - res * res) / std::sqrt(g2);
      a = gs - d;
      b = gs + d;
    } else {
      bool small = std::abs(x) <= n * tol;
      if (small) {
        a = 0.0;
        b = S.contains(0.0, n * tol) ? kInf : 0.0;
      } else {
        auto [slo, shi] = S.ray_interval(x, n * tol);
        if (slo > shi || shi <= 0.0)
          return fail("first coordinate of block " + std::to_string(j) + " outside the cone");
        a = 1.0 / shi;
        b = slo > 0.0 ? 1.0 / slo : kInf;
      }
    }
    if (nj >= 2) {
      cplx c2 = c.blocks[j][1];
      if (cond == Condition::curvature) {
        cplx g = *f.gradient(lam);
        double eta = curvature_eta(f, lam);
        double lhs = rdot(c2, g * g) - tol * std::norm(g);
        if (eta > 0) {
          a = std::max(a, lhs * n / eta);
        } else if (lhs > 0) {
          return fail("second coordinate of block " + std::to_string(j) + " outside the halfplane");
        }
      } else if (!q_set(f, lam).contains(c2, tol)) {
        return fail("second coordinate of block " + std::to_string(j) + " outside the cone");
      }
    }
    a = std::max(a, 0.0);
    if (a > b) return fail("no admissible weight for block " + std::to_string(j));
    lo[j] = a;
    hi[j] = b;
  }
  double slo = 0, shi = 0;
  for (int j : as.active) {
    slo += lo[j];
    shi += hi[j];
  }
  if (slo > 1.0 + kSimplexTol || shi < 1.0 - kSimplexTol) return fail("weights cannot sum to one");
  // Witness: distribute the remaining mass over the intervals.
  double rest = 1.0 - slo;
  for (int j : as.active) {
    double room = std::min(hi[j] - lo[j], std::max(rest, 0.0));
    rep.gamma[j] = lo[j] + room;
    rest -= room;
  }
  rep.member = true;
  return rep;
}

bool dp_membership(const RootCluster& pt, const Generator& f, const BlockVector& c, double tol,
                   double active_tol) {
  return dp_check(pt, f, c, tol, active_tol).member;
}

bool dp_horizon_membership(const RootCluster& pt, const Generator& f, const BlockVector& c,
                           double tol, double active_tol) {
  check_shape(pt, c);
  auto as = active_set(pt, f, active_tol);
  if (std::abs(c.head) > tol) return false;
  for (int j : as.inactive)
    if (block_max_abs(c.blocks[j]) > tol) return false;
  for (int j : as.active) {
    require_condition(f, pt.roots[j]);
    if (std::abs(c.blocks[j][0]) > tol) return false;
    if (pt.mult[j] >= 2 && !q_set(f, pt.roots[j]).contains(c.blocks[j][1], tol)) return false;
  }
  return true;
}

SetDescriptor dp_set(const RootCluster& pt, const Generator& f, double active_tol) {
  auto as = active_set(pt, f, active_tol);
  for (int j : as.active) require_condition(f, pt.roots[j]);
  SetDescriptor d;
  d.dim = pt.degree() + 1;
  auto unflat = [pt](std::span<const cplx> x) {
    CVector v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = x[i];
    return BlockVector::unflatten(v, pt.mult);
  };
  d.contains = [=](std::span<const cplx> x, double tol) {
    return dp_membership(pt, f, unflat(x), tol, active_tol);
  };
  d.horizon_contains = [=](std::span<const cplx> x, double tol) {
    return dp_horizon_membership(pt, f, unflat(x), tol, active_tol);
  };
  d.sample = [=](std::mt19937_64& rng) {
    std::exponential_distribution<double> E(1.0);
    std::normal_distribution<double> N(0.0, 1.0);
    std::bernoulli_distribution zero_weight(as.active.size() > 1 ? 0.2 : 0.0);
    std::vector<double> w(pt.size(), 0.0);
    double tot = 0;
    for (int j : as.active) tot += (w[j] = zero_weight(rng) ? 0.0 : E(rng));
    if (tot == 0) tot += (w[as.active.front()] = 1.0);
    BlockVector c = BlockVector::zeros(pt);
    for (int j : as.active) {
      const cplx lam = pt.roots[j];
      const int nj = pt.mult[j];
      const double gam = w[j] / tot;
      c.blocks[j][0] = -gam * f.subdiff(lam).sample(rng) / static_cast<double>(nj);
      if (nj >= 2) {
        bool curv = condition_check(f, lam) == Condition::curvature;
        c.blocks[j][1] = (curv && gam > 0) ? gam * d_set(f, nj, lam).sample(rng)
                                           : q_set(f, lam).sample(rng);
      }
      for (int s = 2; s < nj; ++s) c.blocks[j][s] = {N(rng), N(rng)};
    }
    auto flat = c.flatten();
    return std::vector<cplx>(flat.data(), flat.data() + flat.size());
  };
  return d;
}

bool rsd_f_membership(const RootCluster& pt, const Generator& f, const Poly& v, double tol) {
  return dp_membership(pt, f, poly_coords(pt, v), tol);
}

bool rsd_f_horizon_membership(const RootCluster& pt, const Generator& f, const Poly& v, double tol) {
  return dp_horizon_membership(pt, f, poly_coords(pt, v), tol);
}

double subderivative_f(const RootCluster& pt, const Generator& f, const Poly& v, double tol) {
  auto c = poly_coords(pt, v);
  auto as = active_set(pt, f);
  double best = -kInf;
  for (int j : as.active) {
    const cplx lam = pt.roots[j];
    const int nj = pt.mult[j];
    Condition cond = require_condition(f, lam);
    const auto& w = c.blocks[j];
    double scale = std::max(1.0, block_max_abs(w));
    if (nj >= 3 && block_max_abs(w, 2) > tol * scale) return kInf;
    cplx s = nj >= 2 ? std::sqrt(-w[1]) : cplx(0.0);
    // Re(conj(g) s) must vanish for every subgradient g. Noise e in w[1] becomes sqrt(e) in s,
    // so the test compares squares against a tolerance on the scale of w[1].
    ConvexSet2D S = f.subdiff(lam);
    double hi = S.support(s), lo = -S.support(-s);
    double gmax = 1.0;
    for (cplx u : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) gmax = std::max(gmax, std::abs(S.support(u)));
    double stol2 = tol * scale * gmax * gmax;
    if (hi * hi > stol2 || lo * lo > stol2) return kInf;
    double term = f.dir_deriv(lam, -w[0]);
    if (cond == Condition::curvature && nj >= 2) term += f.second_deriv(lam, s);
    best = std::max(best, term / nj);
  }
  return best;
}

double subderivative_radius(const RootCluster& pt, const Poly& v, double tol) {
  static const Generator rad = Generator::builtin("radius");
  auto as = active_set(pt, rad);
  if (!(as.value > 0.0)) throw DomainError("subderivative_radius: root radius must be positive");
  auto c = poly_coords(pt, v);
  double best = -kInf;
  for (int j : as.active) {
    const cplx lam = pt.roots[j];
    const int nj = pt.mult[j];
    const auto& w = c.blocks[j];
    double scale = std::max(1.0, block_max_abs(w));
    if (nj >= 3 && block_max_abs(w, 2) > tol * scale) return kInf;
    cplx w2 = nj >= 2 ? w[1] : cplx(0.0);
    // w2 must lie on the ray through lambda^2.
    cplx ratio = w2 / (lam * lam);
    if (std::abs(ratio.imag()) > tol * scale || ratio.real() < -tol * scale) return kInf;
    double r = std::abs(lam);
    best = std::max(best, (std::abs(w2) - rdot(lam, w[0])) / (r * nj));
  }
  return best;
}

}  // namespace smax
