#include <doctest.h>

#include <algorithm>
#include <random>

#include "smax/matrix_jordan.hpp"
#include "smax/oracles.hpp"
#include "smax/sampling.hpp"
#include "support/helpers.hpp"

using namespace smax;
using smax::testing::max_coeff_diff;
using smax::testing::random_cplx;
using smax::testing::random_poly;

namespace {

Poly P(std::initializer_list<cplx> c) { return Poly(std::vector<cplx>(c)); }

JordanSpec S(std::vector<EigenBlocks> e) { return JordanSpec(std::move(e)); }

CMatrix nilpotent(int n) {
  CMatrix N = CMatrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) N(i, i + 1) = 1.0;
  return N;
}

CMatrix random_matrix(int n, std::mt19937_64& rng) {
  CMatrix M(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) M(r, c) = random_cplx(rng);
  return M;
}

JordanSpec random_any_spec(std::mt19937_64& rng, bool derogatory, int max_n = 6) {
  RandomSpecOptions opt;
  opt.max_n = max_n;
  opt.derogatory = derogatory;
  return random_spec(Generator::builtin("abscissa"), rng, opt);
}

// Monic polynomial over the n_j eigenvalues of X closest to lambda.
Poly local_factor(const CMatrix& X, cplx lambda, int nj) {
  auto ev = eigenvalues(X);
  std::sort(ev.begin(), ev.end(), [&](cplx a, cplx b) { return std::abs(a - lambda) < std::abs(b - lambda); });
  Poly p = P({1.0});
  for (int k = 0; k < nj; ++k) p = p * P({-ev[k], 1.0});
  return p;
}

cplx taylor_inner(const Poly& a, const Poly& b, int n, cplx lambda) {
  auto ta = taylor_shift(a.resized(n - 1), lambda), tb = taylor_shift(b.resized(n - 1), lambda);
  cplx s = 0;
  for (int k = 0; k < n; ++k) s += std::conj(ta[k]) * tb[k];
  return s;
}

}  // namespace

TEST_CASE("synth builds P^{-1} J P") {
  JordanSpec s = S({{0.0, {2}}});
  CHECK((synth(s) - nilpotent(2)).norm() == 0.0);

  CMatrix A(3, 3);
  A << 1, 1, 0, 0, 1, 0, 0, 0, -1;
  CHECK((synth(testing::spec_A()) - A).norm() == 0.0);

  CHECK_THROWS_AS(JordanSpec({{1.0, {2}}, {1.0, {1}}}), ArgumentError);
  CHECK_THROWS_AS(S({{1.0, {0}}}), ArgumentError);
  CMatrix Psing = CMatrix::Zero(2, 2);
  Psing(0, 0) = 1.0;
  CHECK_THROWS_AS(JordanSpec({{0.0, {2}}}, Psing), DomainError);
}

TEST_CASE("declared layout") {
  CMatrix Bm(1, 1);
  Bm(0, 0) = -3.0;
  JordanSpec s({{1.0, {2, 1}}, {cplx(0, 2), {1}}}, CMatrix(), Bm);
  CHECK(s.n() == 5);
  CHECK(s.n0() == 1);
  CHECK(s.offset(0) == 1);
  CHECK(s.offset(1) == 4);
  CHECK(s.alg(0) == 3);
  CHECK(s.geo(0) == 2);
  CHECK(s.max_block(0) == 2);
  CHECK_FALSE(s.nonderogatory(0));
  CHECK(s.nonderogatory(1));
  CHECK_FALSE(s.all_nonderogatory());
  CHECK(s.block_offset(0, 1) == 3);
  // B must not share an eigenvalue with a declared region.
  Bm(0, 0) = 1.0;
  CHECK_THROWS_AS(JordanSpec({{1.0, {2}}}, CMatrix(), Bm), ArgumentError);
}

TEST_CASE("diagonalizable constructor") {
  CMatrix X(2, 2);
  X << 1, 2, 0, 3;
  JordanSpec s = JordanSpec::diagonalizable(X);
  CHECK((s.X() - X).norm() < 1e-12);
  CHECK(s.count() == 2);
  CMatrix bad = nilpotent(2);
  CHECK_THROWS_AS(JordanSpec::diagonalizable(bad), DomainError);
}

TEST_CASE("characteristic polynomial") {
  CHECK(max_coeff_diff(char_poly(CMatrix::Zero(3, 3)), Poly::monomial(3)) == 0.0);
  CHECK(max_coeff_diff(char_poly(testing::spec_A().X()), P({1.0, -1.0, -1.0, 1.0})) < 1e-14);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix X = random_matrix(4, rng);
    auto from_poly = raw_roots(char_poly(X));
    auto direct = eigenvalues(X);
    REQUIRE(from_poly.size() == direct.size());
    for (cplx z : direct) {
      double best = kInf;
      for (cplx w : from_poly) best = std::min(best, std::abs(w - z));
      CHECK(best < 1e-6);
    }
  }
}

TEST_CASE("characteristic polynomial of a declared structure factors") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    JordanSpec s = random_any_spec(rng, true);
    Poly expect = s.n0() > 0 ? char_poly(s.B()) : P({1.0});
    for (int j = 0; j < s.count(); ++j) expect = expect * elementary(s.alg(j), s.lambda(j));
    CHECK(max_coeff_diff(char_poly(synth(s)), expect) < 1e-8 * std::max(1.0, expect.max_abs_coeff()));
  }
}

TEST_CASE("derivative of the characteristic polynomial") {
  JordanSpec s = S({{0.0, {2}}});
  CHECK(char_poly_deriv_action(s, CMatrix::Zero(2, 2)).degree() == -1);
  CHECK(max_coeff_diff(char_poly_deriv_action(s, CMatrix::Identity(2, 2)), P({0.0, -2.0, 0.0})) < 1e-15);

  JordanSpec d = S({{0.0, {1, 1}}});
  CMatrix E = testing::unit(2, 0, 1);
  Poly fd = fd_char_poly_derivative(d.X(), E);
  CHECK(max_coeff_diff(char_poly_deriv_action(d, E), fd) < 1e-6);
  CMatrix Z = testing::unit(2, 0, 0);
  CHECK(max_coeff_diff(char_poly_deriv_action(d, Z), P({0.0, -1.0, 0.0})) < 1e-15);
}

TEST_CASE("derivative of the characteristic polynomial matches finite differences") {
  std::mt19937_64 rng(7);
  int used = 0;
  for (int trial = 0; used < 50 && trial < 5000; ++trial) {
    JordanSpec s = random_any_spec(rng, trial % 2 == 0);
    if (s.n0() > 0) continue;
    ++used;
    CMatrix Z = random_direction(s.n(), rng);
    Poly exact = char_poly_deriv_action(s, Z);
    Poly fd = fd_char_poly_derivative(s.X(), Z);
    for (int k = 0; k <= s.n(); ++k)
      CHECK(std::abs(exact.coeff(k) - fd.coeff(k)) <= 1e-5 * std::max(1.0, std::abs(exact.coeff(k))));
  }
  CHECK(used == 50);
}

TEST_CASE("Jordan-perturbed determinant") {
  const std::vector<cplx> grid = {0.0, 1.0, cplx(0, 1), cplx(-0.5, 0.3), 2.0};
  for (int n = 1; n <= 6; ++n) {
    std::vector<cplx> zero(n, 0.0);
    for (cplx xi : grid) CHECK(std::abs(jordan_perturbed_det(n, zero, xi) - std::pow(xi, n)) < 1e-12);
  }
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    std::vector<cplx> l = {random_cplx(rng), random_cplx(rng)};
    cplx xi = random_cplx(rng);
    CHECK(std::abs(jordan_perturbed_det(2, l, xi) - ((xi - l[0]) * (xi - l[0]) - l[1])) < 1e-12);
  }
  // Against a dense determinant.
  for (int n = 2; n <= 6; ++n) {
    std::vector<cplx> l(n);
    for (auto& x : l) x = random_cplx(rng);
    cplx xi = random_cplx(rng);
    CMatrix M = xi * CMatrix::Identity(n, n) - nilpotent(n);
    CMatrix NT = nilpotent(n).transpose();
    CMatrix Pw = CMatrix::Identity(n, n);
    for (int s = 0; s < n; ++s) {
      M -= l[s] * Pw;
      Pw = Pw * NT;
    }
    cplx det = M.determinant();
    CHECK(std::abs(jordan_perturbed_det(n, l, xi) - det) < 1e-10 * std::max(1.0, std::abs(det)));
  }
}

TEST_CASE("determinant expansion is first-order accurate") {
  std::mt19937_64 rng(11);
  const std::vector<cplx> grid = {0.0, 0.5, cplx(0, 1), cplx(-1, 0.5), cplx(1.5, -0.5)};
  for (int n = 2; n <= 6; ++n) {
    std::vector<cplx> dir(n);
    for (auto& x : dir) x = random_cplx(rng);
    double prev = 0;
    for (double scale : {1e-2, 1e-3, 1e-4}) {
      std::vector<cplx> l(n);
      for (int s = 0; s < n; ++s) l[s] = scale * dir[s];
      double r = det_expansion_residual(n, l, grid);
      if (prev > 0) CHECK(prev / r >= 8.0);
      prev = r;
    }
  }
}

TEST_CASE("eigenvalue gradients") {
  JordanSpec s = S({{0.0, {2}}});
  CHECK((lambda_grad(s, 0, 0) - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-15);
  CHECK((lambda_grad(s, 0, 1) - nilpotent(2).transpose()).norm() < 1e-15);
  CHECK_THROWS_AS(lambda_grad(testing::spec_B(), 0, 0), DomainError);
}

TEST_CASE("eigenvalue gradients predict the local factor") {
  // d/dt tau_{n_j-s-1}(local factor of X + tZ) = -(n_j - s) <grad lambda_js, Z>.
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    JordanSpec s = random_any_spec(rng, false, 5);
    CMatrix Z = random_direction(s.n(), rng);
    for (int j = 0; j < s.count(); ++j) {
      const int nj = s.alg(j);
      const double h = 1e-4;
      Poly gp = local_factor(s.X() + h * Z, s.lambda(j), nj), gm = local_factor(s.X() - h * Z, s.lambda(j), nj);
      auto tp = taylor_shift(gp, s.lambda(j)), tm = taylor_shift(gm, s.lambda(j));
      // Splitting of a multiple eigenvalue is O(h^{1/n}), but the symmetric factor is smooth.
      for (int sidx = 0; sidx < nj; ++sidx) {
        cplx deriv = (tp[nj - sidx - 1] - tm[nj - sidx - 1]) / (2 * h);
        cplx pred = -static_cast<double>(nj - sidx) * frob_inner(lambda_grad(s, j, sidx), Z);
        CHECK(std::abs(deriv - pred) <= 1e-4 * std::max(1.0, std::abs(pred)));
        ++checked;
      }
      // Same numbers through g'.
      Poly g = g_prime_action(s, j, Z);
      auto tg = taylor_shift(g.resized(nj - 1), s.lambda(j));
      for (int sidx = 0; sidx < nj; ++sidx) {
        cplx pred = -static_cast<double>(nj - sidx) * frob_inner(lambda_grad(s, j, sidx), Z);
        CHECK(std::abs(tg[nj - sidx - 1] - pred) < 1e-9 * std::max(1.0, std::abs(pred)));
      }
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("adjoint of g'") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    JordanSpec s = random_any_spec(rng, false, 6);
    for (int j = 0; j < s.count(); ++j) {
      const int nj = s.alg(j);
      Poly h = random_poly(nj - 1, rng);
      CMatrix Z = random_direction(s.n(), rng);
      double lhs = frob_rinner(g_prime_adjoint(s, j, h), Z);
      double rhs = taylor_inner(h, g_prime_action(s, j, Z), nj, s.lambda(j)).real();
      CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("active factor") {
  const Generator rho = Generator::builtin("radius");
  const Generator re = Generator::builtin("abscissa");
  ActiveFactor ar = active_factor(testing::spec_A(), rho);
  CHECK(ar.active == std::vector<int>{0, 1});
  CHECK(max_coeff_diff(ar.ptilde.to_poly(), P({1.0, -1.0, -1.0, 1.0})) < 1e-14);

  ActiveFactor aa = active_factor(testing::spec_A(), re);
  CHECK(aa.active == std::vector<int>{0});
  CHECK(max_coeff_diff(aa.ptilde.to_poly(), P({1.0, -2.0, 1.0})) < 1e-14);
  // The inactive eigenvalue moves into B; the matrix is unchanged.
  CHECK(aa.spec.n0() == 1);
  CHECK((aa.spec.X() - testing::spec_A().X()).norm() < 1e-14);

  CMatrix Bm(1, 1);
  Bm(0, 0) = 2.0;
  CHECK_THROWS_AS(active_factor(JordanSpec({}, CMatrix(), Bm), re), DomainError);
}

TEST_CASE("R map") {
  JordanSpec s = S({{0.0, {2}}});
  auto [z0, Y0] = R_apply(s, BlockVector{0.0, {{0.0, 0.0}}});
  CHECK(z0 == cplx(0.0));
  CHECK(Y0.norm() == 0.0);

  const cplx v10(0.3, 1), v11(-2, 0.5);
  auto [z, Y] = R_apply(s, BlockVector{0.0, {{v10, v11}}});
  CMatrix expect = -v10 * CMatrix::Identity(2, 2) - v11 * nilpotent(2).transpose();
  CHECK((Y - expect).norm() < 1e-15);

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    JordanSpec r = random_any_spec(rng, false, 5);
    BlockVector v{0.0, {}};
    for (int j = 0; j < r.count(); ++j) {
      v.blocks.emplace_back(r.alg(j));
      for (auto& c : v.blocks.back()) c = random_cplx(rng);
    }
    auto [h, Yr] = R_apply(r, v);
    CHECK(Yr.norm() > 1e-6 * v.norm());
    RangeFit fit = R_range_fit(r, Yr);
    CHECK(fit.residual < 1e-9 * std::max(1.0, Yr.norm()));
    for (int j = 0; j < r.count(); ++j)
      for (int k = 0; k < r.alg(j); ++k) CHECK(std::abs(fit.v.blocks[j][k] - v.blocks[j][k]) < 1e-8);
  }
}

TEST_CASE("R range fit flags matrices outside the range") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    JordanSpec r = random_any_spec(rng, false, 5);
    if (r.n() < 2) continue;
    CMatrix Y = random_matrix(r.n(), rng);
    CHECK(R_range_fit(r, Y).residual > 1e-3);
  }
}
