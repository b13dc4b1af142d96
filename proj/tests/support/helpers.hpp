#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "smax/core.hpp"
#include "smax/matrix_jordan.hpp"
#include "smax/poly.hpp"

namespace smax::testing {

inline double max_coeff_diff(const Poly& a, const Poly& b) {
  const int n = std::max(a.size(), b.size());
  double d = 0;
  for (int k = 0; k < n; ++k) d = std::max(d, std::abs(a.coeff(k) - b.coeff(k)));
  return d;
}

inline Poly random_poly(int degree, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<cplx> c(degree + 1);
  for (auto& x : c) x = {N(rng), N(rng)};
  return Poly(std::move(c));
}

inline cplx random_cplx(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  return {N(rng), N(rng)};
}

inline CMatrix diag(std::initializer_list<cplx> d) {
  CMatrix D = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (cplx x : d) D(i, i) = x, ++i;
  return D;
}

inline CMatrix unit(int n, int r, int c) {
  CMatrix E = CMatrix::Zero(n, n);
  E(r, c) = 1.0;
  return E;
}

inline JordanSpec spec_A() { return JordanSpec({{1.0, {2}}, {-1.0, {1}}}); }
inline JordanSpec spec_B() { return JordanSpec({{1.0, {2, 1}}}); }

}  // namespace smax::testing
