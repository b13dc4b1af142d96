#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include "smax/convex_set.hpp"
#include "smax/core.hpp"

namespace smax {

enum class Smoothness {
  quadratic,   // globally a real quadratic form plus affine part
  c2,          // twice differentiable near the point
  nonsmooth,   // not differentiable at the point
};

// Which structural hypothesis holds at a point.
//   curvature: f quadratic, or C^2 with positive definite Hessian there.
//   spanning:  {t*g : t real, g in subdifferential} is all of C.
enum class Condition { curvature, spanning, neither };

std::string to_string(Condition c);

/// Convex generator f : C -> R with the local data the subdifferential formulas need.
class Generator {
 public:
  struct Hooks {
    std::string name;
    std::function<double(cplx)> value;
    std::function<ConvexSet2D(cplx)> subdiff;
    // Real Hessian on (Re, Im); may be empty for nonsmooth generators.
    std::function<Eigen::Matrix2d(cplx)> hessian;
    std::function<Smoothness(cplx)> smoothness;
  };

  explicit Generator(Hooks hooks);

  // abscissa, radius, radius2, ell1.
  static Generator builtin(std::string_view name);

  const std::string& name() const { return h_.name; }
  double value(cplx z) const { return h_.value(z); }
  ConvexSet2D subdiff(cplx z) const { return h_.subdiff(z); }
  Smoothness smoothness(cplx z) const { return h_.smoothness(z); }
  std::optional<cplx> gradient(cplx z) const;
  // f'(z; d) as the support function of the subdifferential.
  double dir_deriv(cplx z, cplx d) const { return subdiff(z).support(d); }
  // f''(z; d, d); requires a Hessian hook.
  double second_deriv(cplx z, cplx d) const;
  bool has_hessian() const { return static_cast<bool>(h_.hessian); }
  Eigen::Matrix2d hessian(cplx z) const;

 private:
  Hooks h_;
};

Condition condition_check(const Generator& f, cplx lambda);

// eta = f''(lambda; i*grad, i*grad); curvature condition required.
double curvature_eta(const Generator& f, cplx lambda);

// -cone(S^2) + i*rspan(S^2) for S the subdifferential at lambda.
ConvexSet2D q_set(const Generator& f, cplx lambda);

// {theta : Re(conj(theta) grad^2) <= eta / n_j}; curvature condition required.
ConvexSet2D d_set(const Generator& f, int n_j, cplx lambda);

/// Membership oracle plus sampler for a subset of C^dim.
struct SetDescriptor {
  int dim = 0;
  std::function<bool(std::span<const cplx>, double)> contains;
  std::function<bool(std::span<const cplx>, double)> horizon_contains;
  std::function<std::vector<cplx>(std::mt19937_64&)> sample;
};

// Per-root block set in C^{n_j} and its horizon cone.
SetDescriptor gamma_set(const Generator& f, int n_j, cplx lambda);
// Inactive roots contribute the zero block only.
SetDescriptor gamma_set(const Generator& f, int n_j, cplx lambda, bool active);

}  // namespace smax
