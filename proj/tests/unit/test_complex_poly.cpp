#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "smax/generators.hpp"
#include "smax/matrix_jordan.hpp"
#include "smax/poly.hpp"
#include "support/helpers.hpp"

using namespace smax;
using smax::testing::max_coeff_diff;
using smax::testing::random_cplx;
using smax::testing::random_poly;

namespace {

Poly P(std::initializer_list<cplx> c) { return Poly(std::vector<cplx>(c)); }

// (z - r_1)(z - r_2)... by repeated convolution.
Poly from_roots(const std::vector<cplx>& r) {
  Poly p = P({1.0});
  for (cplx x : r) p = p * P({-x, 1.0});
  return p;
}

}  // namespace

TEST_CASE("lex_leq examples") {
  CHECK(lex_leq(0.0, cplx(1, 1)));
  CHECK_FALSE(lex_leq(1.0, cplx(1, -1)));
  CHECK(lex_leq(cplx(2, 3), cplx(2, 3)));
}

TEST_CASE("lex_leq is a total order on random triples") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> small(-2, 2);
  auto draw = [&] { return cplx(small(rng), small(rng)); };
  for (int i = 0; i < 2000; ++i) {
    cplx a = draw(), b = draw(), c = draw();
    CHECK((lex_leq(a, b) || lex_leq(b, a)));
    if (lex_leq(a, b) && lex_leq(b, a)) CHECK(a == b);
    if (lex_leq(a, b) && lex_leq(b, c)) CHECK(lex_leq(a, c));
  }
}

TEST_CASE("elementary monomials") {
  Poly e0 = elementary(0, cplx(3, -2));
  CHECK(e0.degree() == 0);
  CHECK(e0.coeff(0) == cplx(1.0));

  CHECK(max_coeff_diff(elementary(2, 1.0), P({1.0, -2.0, 1.0})) < 1e-15);

  const cplx i(0, 1);
  Poly e3 = elementary(3, i);
  Poly conv = P({-i, 1.0}) * P({-i, 1.0}) * P({-i, 1.0});
  CHECK(max_coeff_diff(e3, conv) < 1e-14);
  CHECK(std::abs(e3.coeff(0) - i) < 1e-14);  // (-i)^3 = i
  CHECK(std::abs(e3.coeff(1) - cplx(-3.0)) < 1e-14);
  CHECK(std::abs(e3.coeff(2) + 3.0 * i) < 1e-14);
}

TEST_CASE("Taylor coefficients") {
  const cplx l0(0.3, -1.1);
  for (int n = 1; n <= 5; ++n) {
    Poly e = elementary(n, l0);
    CHECK(std::abs(taylor_coeff(e, n, l0) - cplx(1.0)) < 1e-12);
    for (int k = 0; k < n; ++k) CHECK(std::abs(taylor_coeff(e, k, l0)) < 1e-12);
  }
  CHECK(std::abs(taylor_coeff(P({1.0, 0.0, 1.0}), 1, 1.0) - cplx(2.0)) < 1e-15);
}

// Max coefficient error of sum_k t_k (z - l0)^k against p, expanded in extended precision;
// kappa = sum_k |t_k| (1 + |l0|)^k is the scale of the cancellation.
std::pair<double, double> reconstruction_error(const Poly& p, cplx l0) {
  using ld = std::complex<long double>;
  const int deg = p.size() - 1;
  auto t = taylor_shift(p, l0);
  std::vector<ld> sum(deg + 1, 0.0L), e{1.0L};
  double kappa = 0;
  for (int k = 0; k <= deg; ++k) {
    kappa += std::abs(t[k]) * std::pow(1.0 + std::abs(l0), k);
    for (int i = 0; i <= k; ++i) sum[i] += ld(t[k].real(), t[k].imag()) * e[i];
    std::vector<ld> next(e.size() + 1, 0.0L);
    for (std::size_t i = 0; i < e.size(); ++i) {
      next[i + 1] += e[i];
      next[i] -= ld(l0.real(), l0.imag()) * e[i];
    }
    e = next;
  }
  double err = 0;
  for (int k = 0; k <= deg; ++k)
    err = std::max(err, static_cast<double>(std::abs(sum[k] - ld(p.coeff(k).real(), p.coeff(k).imag()))));
  return {err, kappa};
}

TEST_CASE("Taylor expansion reconstructs random polynomials") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    Poly p = random_poly(static_cast<int>(rng() % 9), rng);
    // Base point in the closed unit disk: absolute error bound.
    cplx l0 = std::polar(std::sqrt(U(rng)), 2 * std::numbers::pi * U(rng));
    CHECK(reconstruction_error(p, l0).first < 1e-12);
    // Unrestricted base point: the bound scales with the cancellation.
    cplx l1 = random_cplx(rng, 2.0);
    auto [err, kappa] = reconstruction_error(p, l1);
    CHECK(err <= 1e-15 * kappa);
    CHECK(max_coeff_diff(from_taylor(taylor_shift(p, l0), l0), p) < 1e-12);
  }
}

TEST_CASE("roots with multiplicity clustering") {
  RootCluster sq = roots(P({1.0, -2.0, 1.0}), 1e-6);
  REQUIRE(sq.size() == 1);
  CHECK(std::abs(sq.roots[0] - cplx(1.0)) < 1e-7);
  CHECK(sq.mult[0] == 2);

  RootCluster two = roots(P({0.0, 1.0, 1.0}), 1e-6);
  REQUIRE(two.size() == 2);
  CHECK(std::abs(two.roots[0] + 1.0) < 1e-12);
  CHECK(std::abs(two.roots[1]) < 1e-12);
  CHECK(two.mult == std::vector<int>{1, 1});

  Poly q = from_roots({1.0, 1.0, -1.0});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1e-12, 1e-12);
  for (int k = 0; k < 3; ++k) q[k] += cplx(U(rng), U(rng));
  RootCluster pert = roots(q, 1e-5);
  REQUIRE(pert.size() == 2);
  CHECK(std::abs(pert.roots[0] + 1.0) < 1e-8);
  CHECK(std::abs(pert.roots[1] - 1.0) < 1e-5);
  CHECK(pert.mult == std::vector<int>{1, 2});
}

TEST_CASE("roots of a product of known roots recovers the clusters") {
  std::mt19937_64 rng(5);
  const double tol = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    int m = 1 + static_cast<int>(rng() % 4);
    std::vector<cplx> r;
    std::vector<int> mult;
    while (static_cast<int>(r.size()) < m) {
      cplx z = random_cplx(rng);
      bool far = std::all_of(r.begin(), r.end(), [&](cplx w) { return std::abs(w - z) > 0.3; });
      if (!far) continue;
      r.push_back(z);
      mult.push_back(1 + static_cast<int>(rng() % 2));
    }
    RootCluster rc = RootCluster::make(r, mult);
    RootCluster back = roots(rc.to_poly(), tol);
    REQUIRE(back.size() == rc.size());
    CHECK(back.mult == rc.mult);
    for (int j = 0; j < rc.size(); ++j) CHECK(std::abs(back.roots[j] - rc.roots[j]) < 1e-5);
  }
}

TEST_CASE("RootCluster rejects repeated roots") {
  CHECK_THROWS_AS(RootCluster::make({1.0, 1.0}, {1, 1}), ArgumentError);
  CHECK_THROWS_AS(RootCluster::make({1.0}, {0}), ArgumentError);
}

TEST_CASE("active sets") {
  const Generator re = Generator::builtin("abscissa");
  const Generator rho = Generator::builtin("radius");
  const Generator r2 = Generator::builtin("radius2");
  Poly p = from_roots({1.0, -1.0});

  ActiveSet a = active_set(p, re);
  CHECK(a.value == doctest::Approx(1.0));
  REQUIRE(a.active.size() == 1);
  CHECK(std::abs(a.cluster.roots[a.active[0]] - cplx(1.0)) < 1e-12);

  ActiveSet b = active_set(p, rho);
  CHECK(b.value == doctest::Approx(1.0));
  CHECK(b.active.size() == 2);

  ActiveSet c = active_set(from_roots({0.0, 0.0, 0.5}), r2);
  CHECK(c.value == doctest::Approx(0.125));
  REQUIRE(c.active.size() == 1);
  CHECK(std::abs(c.cluster.roots[c.active[0]] - cplx(0.5)) < 1e-9);
}

TEST_CASE("poly_root_max") {
  const Generator re = Generator::builtin("abscissa");
  const Generator rho = Generator::builtin("radius");
  for (int n = 1; n <= 6; ++n) CHECK(std::abs(poly_root_max(Poly::monomial(n), re)) < 1e-12);
  CHECK(poly_root_max(char_poly(testing::spec_A().X()), rho) == doctest::Approx(1.0));
  CHECK(poly_root_max(from_roots({cplx(0, 2), -1.0}), rho) == doctest::Approx(2.0));
}

TEST_CASE("poly_root_max is scale invariant and matches the direct maximum") {
  const Generator rho = Generator::builtin("radius");
  const Generator re = Generator::builtin("abscissa");
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<cplx> r;
    for (int k = 0; k < 5; ++k) r.push_back(random_cplx(rng));
    Poly p = from_roots(r);
    for (const Generator* f : {&rho, &re}) {
      double direct = -kInf;
      for (cplx z : r) direct = std::max(direct, f->value(z));
      CHECK(poly_root_max(p, *f) == doctest::Approx(direct).epsilon(1e-8));
      CHECK(poly_root_max(p * cplx(-2.5, 0.7), *f) == doctest::Approx(direct).epsilon(1e-8));
    }
  }
}
