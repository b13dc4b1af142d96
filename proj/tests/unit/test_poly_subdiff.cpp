#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "smax/factorization.hpp"
#include "smax/oracles.hpp"
#include "smax/poly_subdiff.hpp"
#include "support/helpers.hpp"

using namespace smax;
using smax::testing::random_cplx;
using smax::testing::random_poly;

namespace {

Poly P(std::initializer_list<cplx> c) { return Poly(std::vector<cplx>(c)); }

BlockVector bv(cplx head, std::vector<std::vector<cplx>> blocks) { return BlockVector{head, std::move(blocks)}; }

const Generator& abscissa() {
  static const Generator f = Generator::builtin("abscissa");
  return f;
}

constexpr double kGrid[] = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};

// Roots with real part 0.5 are active for the abscissa, the rest sit at real part <= -0.2.
RootCluster random_abscissa_cluster(std::mt19937_64& rng, bool simple, int max_degree = 6) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (;;) {
    int na = 1 + static_cast<int>(rng() % 2), ni = static_cast<int>(rng() % 2);
    std::vector<cplx> r;
    std::vector<int> m;
    int deg = 0;
    for (int k = 0; k < na + ni; ++k) {
      cplx z = k < na ? cplx(0.5, 2 * U(rng)) : cplx(-0.2 - std::abs(U(rng)), 2 * U(rng));
      bool far = true;
      for (cplx w : r) far = far && std::abs(w - z) > 0.3;
      if (!far) continue;
      r.push_back(z);
      m.push_back(simple && k < na ? 1 : 1 + static_cast<int>(rng() % 3));
      deg += m.back();
    }
    if (deg <= max_degree && !r.empty()) return RootCluster::make(r, m);
  }
}

// Radius geometry: active roots on the unit circle.
RootCluster random_radius_cluster(std::mt19937_64& rng, bool simple) {
  std::uniform_real_distribution<double> U(0.0, 2 * std::numbers::pi);
  for (;;) {
    int na = 1 + static_cast<int>(rng() % 2);
    std::vector<cplx> r;
    std::vector<int> m;
    for (int k = 0; k < na + 1; ++k) {
      cplx z = std::polar(k < na ? 1.0 : 0.4, U(rng));
      bool far = true;
      for (cplx w : r) far = far && std::abs(w - z) > 0.3;
      if (!far) continue;
      r.push_back(z);
      m.push_back(simple && k < na ? 1 : 1 + static_cast<int>(rng() % 2));
    }
    return RootCluster::make(r, m);
  }
}

}  // namespace

TEST_CASE("D membership examples") {
  const RootCluster sq = RootCluster::make({0.0}, {2});
  CHECK_FALSE(dp_membership(sq, abscissa(), bv(0.0, {{0.0, 0.0}})));
  DpReport rep = dp_check(sq, abscissa(), bv(0.0, {{-0.5, -3.0}}));
  CHECK(rep.member);
  REQUIRE(rep.gamma.size() == 1);
  CHECK(rep.gamma[0] == doctest::Approx(1.0));

  const RootCluster two = RootCluster::make({0.0, 1.0}, {1, 1});
  CHECK(dp_membership(two, abscissa(), bv(0.0, {{0.0}, {-1.0}})));
  CHECK_FALSE(dp_membership(two, abscissa(), bv(0.0, {{-1.0}, {0.0}})));
  CHECK_FALSE(dp_membership(two, abscissa(), bv(0.5, {{0.0}, {-1.0}})));
}

TEST_CASE("D membership splits weight across active roots") {
  // Both roots active for the abscissa: weights gamma_j = -n_j c_j1 must sum to one.
  const RootCluster two = RootCluster::make({cplx(0, -1), cplx(0, 1)}, {1, 2});
  CHECK(dp_membership(two, abscissa(), bv(0.0, {{-0.25}, {-0.375, -1.0}})));
  CHECK_FALSE(dp_membership(two, abscissa(), bv(0.0, {{-0.25}, {-0.25, -1.0}})));
  // Second coordinate must respect the halfplane scaled by its weight: Re <= 0 for the abscissa.
  CHECK_FALSE(dp_membership(two, abscissa(), bv(0.0, {{-0.25}, {-0.375, 0.1}})));
  // Zero weight on a block forces its second coordinate into the recession cone.
  CHECK(dp_membership(two, abscissa(), bv(0.0, {{-1.0}, {0.0, -2.0}})));
}

TEST_CASE("D samples are members") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    RootCluster pt = random_abscissa_cluster(rng, false);
    SetDescriptor d = dp_set(pt, abscissa());
    auto x = d.sample(rng);
    const std::vector<int>& sizes = pt.mult;
    CVector flat(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) flat(static_cast<Eigen::Index>(i)) = x[i];
    BlockVector c = BlockVector::unflatten(flat, sizes);
    CHECK(dp_check(pt, abscissa(), c).member);
    CHECK(d.contains(x, 1e-8));
  }
}

TEST_CASE("regular subdifferential of the root max function") {
  const RootCluster sq = RootCluster::make({0.0}, {2});
  Poly v = poly_from_coords(sq, bv(0.0, {{-0.5, 0.0}}));
  CHECK(rsd_f_membership(sq, abscissa(), v));
  CHECK_FALSE(rsd_f_membership(sq, abscissa(), sq.to_poly()));

  Poly h = poly_from_coords(sq, bv(0.0, {{0.0, -1.0}}));
  CHECK(rsd_f_horizon_membership(sq, abscissa(), h));
  CHECK_FALSE(rsd_f_horizon_membership(sq, abscissa(), v));
  CHECK_FALSE(rsd_f_horizon_membership(sq, abscissa(), poly_from_coords(sq, bv(0.0, {{0.0, 1.0}}))));
}

TEST_CASE("subderivative examples") {
  const RootCluster sq = RootCluster::make({0.0}, {2});
  // Roots of z^2 + t(z + c) coalesce at -t/2 when c = t/4, so the liminf is -1/2.
  CHECK(subderivative_f(sq, abscissa(), P({0.0, 1.0})) == doctest::Approx(-0.5));
  // sqrt(-1) = i is real-orthogonal to the gradient 1: roots of z^2 + t are +-i sqrt(t).
  CHECK(subderivative_f(sq, abscissa(), P({1.0, 0.0})) == doctest::Approx(0.0));
  // Roots of z^2 - t are +-sqrt(t).
  CHECK(subderivative_f(sq, abscissa(), P({-1.0, 0.0})) == kInf);
  CHECK(subderivative_f(sq, abscissa(), Poly::zero(1)) == 0.0);

  CHECK(subderivative_radius(RootCluster::make({1.0}, {1}), P({1.0})) == doctest::Approx(-1.0));
  const RootCluster one2 = RootCluster::make({1.0}, {2});
  CHECK(subderivative_radius(one2, P({2.0, 0.0})) == doctest::Approx(1.0));
  CHECK(subderivative_radius(one2, P({cplx(0, 1), 0.0})) == kInf);
  CHECK_THROWS_AS(subderivative_radius(sq, P({1.0, 0.0})), DomainError);
}

TEST_CASE("subderivative examples agree with difference quotients") {
  const RootCluster sq = RootCluster::make({0.0}, {2});
  // Fixed-direction quotients bound the liminf from above.
  FDReport lin = fd_poly_quotient(sq, abscissa(), P({0.0, 1.0}), kGrid);
  CHECK(lin.extrapolated >= -0.5 - 1e-9);
  // Along v' = z + t/4 the roots coalesce at -t/2, so the quotient is exactly -1/2.
  for (double t : kGrid) {
    Poly p = sq.to_poly() + P({t / 4, 1.0}) * cplx(t);
    CHECK(root_max_extended(p, abscissa()) / t == doctest::Approx(-0.5).epsilon(1e-4));
  }
  FDReport up = fd_poly_quotient(sq, abscissa(), P({-1.0, 0.0}), kGrid);
  CHECK(up.unbounded);
  CHECK(std::abs(up.growth_exponent + 0.5) < 0.1);

  const Generator rho = Generator::builtin("radius");
  FDReport r1 = fd_poly_quotient(RootCluster::make({1.0}, {2}), rho, P({2.0, 0.0}), kGrid);
  CHECK(r1.extrapolated == doctest::Approx(1.0).epsilon(1e-3));
  FDReport ri = fd_poly_quotient(RootCluster::make({1.0}, {2}), rho, P({cplx(0, 1), 0.0}), kGrid);
  CHECK(ri.unbounded);
}

TEST_CASE("subderivative is sublinear") {
  std::mt19937_64 rng(5);
  int finite_pairs = 0;
  for (int trial = 0; trial < 300; ++trial) {
    RootCluster pt = random_abscissa_cluster(rng, false);
    Poly v = random_poly(pt.degree() - 1, rng), w = random_poly(pt.degree() - 1, rng);
    double a = std::exp(random_cplx(rng).real());
    double dv = subderivative_f(pt, abscissa(), v);
    double dav = subderivative_f(pt, abscissa(), v * cplx(a));
    if (std::isfinite(dv)) {
      CHECK(dav == doctest::Approx(a * dv).epsilon(1e-9).scale(1.0));
    } else {
      CHECK(dav == kInf);
    }
    double dw = subderivative_f(pt, abscissa(), w);
    if (std::isfinite(dv) && std::isfinite(dw)) {
      ++finite_pairs;
      CHECK(subderivative_f(pt, abscissa(), v + w) <= dv + dw + 1e-9 * (1 + std::abs(dv) + std::abs(dw)));
    }
  }
  CHECK(finite_pairs > 20);
}

TEST_CASE("subderivative matches quotients at simple active roots") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    RootCluster pt = random_abscissa_cluster(rng, true);
    Poly v = random_poly(pt.degree() - 1, rng);
    double d = subderivative_f(pt, abscissa(), v);
    FDReport fd = fd_poly_quotient(pt, abscissa(), v, kGrid);
    REQUIRE(std::isfinite(d));
    CHECK(std::abs(fd.extrapolated - d) <= 1e-3 * std::max(1.0, std::abs(d)));
  }
  for (int trial = 0; trial < 50; ++trial) {
    RootCluster pt = random_radius_cluster(rng, true);
    Poly v = random_poly(pt.degree() - 1, rng);
    double d = subderivative_radius(pt, v);
    FDReport fd = fd_poly_quotient(pt, Generator::builtin("radius"), v, kGrid);
    CHECK(std::abs(fd.extrapolated - d) <= 1e-3 * std::max(1.0, std::abs(d)));
  }
}

TEST_CASE("subderivative is a lower bound at multiple roots") {
  std::mt19937_64 rng(11);
  int finite = 0, infinite = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RootCluster pt = random_abscissa_cluster(rng, false);
    // Directions of the form F'(0)w with small second Taylor coordinates keep the formula finite
    // about half of the time.
    Poly v = random_poly(pt.degree() - 1, rng);
    double d = subderivative_f(pt, abscissa(), v);
    FDReport fd = fd_poly_quotient(pt, abscissa(), v, kGrid);
    if (std::isfinite(d)) {
      ++finite;
      int m = pt.max_mult();
      double c = calibrated_slack_constant(fd.t, fd.quotients, m);
      for (std::size_t k = 0; k < fd.t.size(); ++k)
        CHECK(d <= fd.quotients[k] + c * std::pow(fd.t[k], 1.0 / m) + 1e-8);
    } else {
      ++infinite;
      CHECK(fd.growth_exponent <= -0.4);
    }
  }
  CHECK(finite + infinite == 100);
}

TEST_CASE("regular subgradients satisfy the subgradient inequality") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    RootCluster pt = random_abscissa_cluster(rng, false);
    SetDescriptor d = dp_set(pt, abscissa());
    auto x = d.sample(rng);
    const std::vector<int>& sizes = pt.mult;
    CVector flat(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) flat(static_cast<Eigen::Index>(i)) = x[i];
    BlockVector c = BlockVector::unflatten(flat, sizes);
    Poly v = poly_from_coords(pt, c);
    REQUIRE(rsd_f_membership(pt, abscissa(), v));
    for (int k = 0; k < 200; ++k) {
      Poly z = random_poly(pt.degree() - 1, rng);
      double lhs = pn_inner(c, poly_coords(pt, z)).real();
      double rhs = subderivative_f(pt, abscissa(), z);
      CHECK(lhs <= rhs + 1e-8 * (1 + std::abs(lhs)));
    }
  }
}

TEST_CASE("directions with vanishing lower Taylor coordinates stay finite") {
  // Rounding in the coordinates must not be amplified by the square root into a +inf verdict.
  std::mt19937_64 rng(17);
  std::normal_distribution<double> N(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    RootCluster pt = random_abscissa_cluster(rng, false);
    BlockVector c{0.0, {}};
    for (int j = 0; j < pt.size(); ++j) {
      c.blocks.emplace_back(pt.mult[j]);
      const bool active = std::abs(pt.roots[j].real() - 0.5) < 1e-12;
      for (int k = 0; k < pt.mult[j]; ++k) c.blocks[j][k] = active && k > 0 ? cplx(0.0) : cplx(N(rng), N(rng));
    }
    CHECK(std::isfinite(subderivative_f(pt, abscissa(), poly_from_coords(pt, c))));
    ++checked;
  }
  CHECK(checked == 200);
}
