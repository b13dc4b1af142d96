#include "smax/generators.hpp"

#include <algorithm>
#include <cmath>

namespace smax {

std::string to_string(Condition c) {
  switch (c) {
    case Condition::curvature:
      return "curvature";
    case Condition::spanning:
      return "spanning";
    case Condition::neither:
      return "neither";
  }
  return "neither";
}

Generator::Generator(Hooks hooks) : h_(std::move(hooks)) {
  if (!h_.value || !h_.subdiff || !h_.smoothness)
    throw ArgumentError("generator needs value, subdiff and smoothness hooks");
}

std::optional<cplx> Generator::gradient(cplx z) const {
  auto s = subdiff(z);
  if (!s.is_singleton()) return std::nullopt;
  return s.vertices().front();
}

Eigen::Matrix2d Generator::hessian(cplx z) const {
  if (!h_.hessian) throw UnsupportedGenerator("generator '" + name() + "' has no Hessian");
  return h_.hessian(z);
}

double Generator::second_deriv(cplx z, cplx d) const {
  Eigen::Vector2d v(d.real(), d.imag());
  return v.dot(hessian(z) * v);
}

Generator Generator::builtin(std::string_view name) {
  Hooks h;
  h.name = std::string(name);
  if (name == "abscissa") {
    h.value = [](cplx z) { return z.real(); };
    h.subdiff = [](cplx) { return ConvexSet2D::point(1.0); };
    h.hessian = [](cplx) { return Eigen::Matrix2d::Zero().eval(); };
    h.smoothness = [](cplx) { return Smoothness::quadratic; };
  } else if (name == "radius2") {
    h.value = [](cplx z) { return 0.5 * std::norm(z); };
    h.subdiff = [](cplx z) { return ConvexSet2D::point(z); };
    h.hessian = [](cplx) { return Eigen::Matrix2d::Identity().eval(); };
    h.smoothness = [](cplx) { return Smoothness::quadratic; };
  } else if (name == "radius") {
    h.value = [](cplx z) { return std::abs(z); };
    h.subdiff = [](cplx z) {
      if (z == cplx(0.0)) return ConvexSet2D::disk(0.0, 1.0);
      return ConvexSet2D::point(z / std::abs(z));
    };
    h.hessian = [](cplx z) {
      double r = std::abs(z);
      if (r == 0.0) throw UnsupportedGenerator("radius has no Hessian at 0");
      Eigen::Vector2d u(z.real() / r, z.imag() / r);
      return ((Eigen::Matrix2d::Identity() - u * u.transpose()) / r).eval();
    };
    h.smoothness = [](cplx z) { return z == cplx(0.0) ? Smoothness::nonsmooth : Smoothness::c2; };
  } else if (name == "ell1") {
    h.value = [](cplx z) { return std::abs(z.real()) + std::abs(z.imag()); };
    h.subdiff = [](cplx z) {
      auto range = [](double x) -> std::pair<double, double> {
        if (x > 0) return {1.0, 1.0};
        if (x < 0) return {-1.0, -1.0};
        return {-1.0, 1.0};
      };
      auto [a0, a1] = range(z.real());
      auto [b0, b1] = range(z.imag());
      return ConvexSet2D::polygon({{a0, b0}, {a1, b0}, {a1, b1}, {a0, b1}});
    };
    h.hessian = [](cplx z) {
      if (z.real() == 0.0 || z.imag() == 0.0)
        throw UnsupportedGenerator("ell1 has no Hessian on the axes");
      return Eigen::Matrix2d::Zero().eval();
    };
    h.smoothness = [](cplx z) {
      return (z.real() == 0.0 || z.imag() == 0.0) ? Smoothness::nonsmooth : Smoothness::c2;
    };
  } else {
    throw ArgumentError("unknown generator '" + std::string(name) + "'");
  }
  return Generator(std::move(h));
}

Condition condition_check(const Generator& f, cplx lambda) {
  Smoothness s = f.smoothness(lambda);
  if (s == Smoothness::quadratic) return Condition::curvature;
  if (s == Smoothness::c2 && f.has_hessian()) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(f.hessian(lambda));
    double top = std::abs(es.eigenvalues()(1));
    if (es.eigenvalues()(0) > 1e-12 * std::max(1.0, top)) return Condition::curvature;
  }
  if (f.subdiff(lambda).spans_plane()) return Condition::spanning;
  return Condition::neither;
}

double curvature_eta(const Generator& f, cplx lambda) {
  auto g = f.gradient(lambda);
  if (!g) throw UnsupportedGenerator("generator not differentiable at the point");
  return f.second_deriv(lambda, cplx(0, 1) * *g);
}

ConvexSet2D q_set(const Generator& f, cplx lambda) {
  auto s = f.subdiff(lambda);
  if (s.is_zero()) throw DomainError("subdifferential is {0}");
  if (s.is_singleton()) {
    cplx g = s.vertices().front();
    return ConvexSet2D::halfplane(g * g, 0.0);
  }
  // Squares of a neighbourhood of 0 reach every direction, so the cone is all of C.
  if (s.contains_origin_interior()) return ConvexSet2D::plane();
  throw UnsupportedGenerator("q_set: subdifferential " + s.describe() +
                             " is neither a singleton nor a neighbourhood of 0");
}

ConvexSet2D d_set(const Generator& f, int n_j, cplx lambda) {
  if (n_j < 1) throw ArgumentError("d_set: n_j must be positive");
  if (condition_check(f, lambda) != Condition::curvature)
    throw UnsupportedGenerator("d_set requires the curvature condition");
  cplx g = *f.gradient(lambda);
  if (g == cplx(0.0)) throw DomainError("d_set: gradient vanishes");
  return ConvexSet2D::halfplane(g * g, curvature_eta(f, lambda) / n_j);
}

SetDescriptor gamma_set(const Generator& f, int n_j, cplx lambda) {
  if (n_j < 1) throw ArgumentError("gamma_set: n_j must be positive");
  Condition cond = condition_check(f, lambda);
  if (cond == Condition::neither)
    throw UnsupportedGenerator("gamma_set: generator '" + f.name() + "' satisfies neither condition");
  ConvexSet2D first = f.subdiff(lambda);
  if (first.is_zero()) throw DomainError("gamma_set: subdifferential is {0}");
  ConvexSet2D second = cond == Condition::curvature ? d_set(f, n_j, lambda) : q_set(f, lambda);
  ConvexSet2D cone = q_set(f, lambda);
  double n = n_j;

  SetDescriptor d;
  d.dim = n_j;
  d.contains = [=](std::span<const cplx> x, double tol) {
    if (static_cast<int>(x.size()) != n_j) throw ArgumentError("gamma_set: wrong dimension");
    if (!first.contains(-n * x[0], n * tol)) return false;
    return n_j < 2 || second.contains(x[1], tol);
  };
  d.horizon_contains = [=](std::span<const cplx> x, double tol) {
    if (static_cast<int>(x.size()) != n_j) throw ArgumentError("gamma_set: wrong dimension");
    if (std::abs(x[0]) > tol) return false;
    return n_j < 2 || cone.contains(x[1], tol);
  };
  d.sample = [=](std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<cplx> x(n_j);
    x[0] = -first.sample(rng) / n;
    if (n_j >= 2) x[1] = second.sample(rng);
    for (int s = 2; s < n_j; ++s) x[s] = {N(rng), N(rng)};
    return x;
  };
  return d;
}

SetDescriptor gamma_set(const Generator& f, int n_j, cplx lambda, bool active) {
  if (active) return gamma_set(f, n_j, lambda);
  if (n_j < 1) throw ArgumentError("gamma_set: n_j must be positive");
  SetDescriptor d;
  d.dim = n_j;
  auto zero = [n_j](std::span<const cplx> x, double tol) {
    if (static_cast<int>(x.size()) != n_j) throw ArgumentError("gamma_set: wrong dimension");
    return std::all_of(x.begin(), x.end(), [tol](cplx z) { return std::abs(z) <= tol; });
  };
  d.contains = zero;
  d.horizon_contains = zero;
  d.sample = [n_j](std::mt19937_64&) { return std::vector<cplx>(n_j, 0.0); };
  return d;
}

}  // namespace smax
