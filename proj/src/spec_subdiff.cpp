#include "smax/spec_subdiff.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "smax/poly_subdiff.hpp"

namespace smax {
namespace {

struct ActiveInfo {
  double value = -kInf;
  std::vector<bool> active;
};

// Active declared eigenvalues; eigenvalues of B must stay strictly below the maximum.
ActiveInfo classify(const JordanSpec& spec, const std::function<double(cplx)>& val,
                    double active_tol = kActiveTol) {
  ActiveInfo a;
  if (spec.count() == 0) throw DomainError("no declared eigenvalue");
  for (int j = 0; j < spec.count(); ++j) a.value = std::max(a.value, val(spec.lambda(j)));
  for (cplx mu : spec.B_eigenvalues())
    if (val(mu) >= a.value - active_tol) throw DomainError("an eigenvalue of B is active");
  for (int j = 0; j < spec.count(); ++j) a.active.push_back(val(spec.lambda(j)) >= a.value - active_tol);
  return a;
}

ActiveInfo classify(const JordanSpec& spec, const Generator& f) {
  return classify(spec, [&](cplx z) { return f.value(z); });
}

double structural_tol(const Tolerances& tol, const CMatrix& W) {
  return tol.structural * std::max(1.0, W.norm());
}

void add(std::vector<Violation>& v, const std::string& what, double r) { v.push_back({what, r}); }

// Gradient direction and curvature offset per active eigenvalue.
struct Local {
  cplx g;
  double eta;
};

Local curvature_local(const Generator& f, cplx lam) {
  if (condition_check(f, lam) != Condition::curvature)
    throw UnsupportedGenerator("generator '" + f.name() + "' lacks the curvature condition at an active eigenvalue");
  cplx g = *f.gradient(lam);
  if (g == cplx(0.0)) throw DomainError("gradient vanishes at an active eigenvalue");
  return {g, curvature_eta(f, lam)};
}

Local radius_local(cplx lam) { return {lam / std::abs(lam), 1.0 / std::abs(lam)}; }

// W_j with lower-triangular Toeplitz diagonal sub-blocks sharing theta.
void fill_region(CMatrix& W, const JordanSpec& spec, int j, const std::vector<cplx>& theta) {
  const auto& blocks = spec.eigs()[j].blocks;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    int o = spec.block_offset(j, static_cast<int>(k)), m = blocks[k];
    for (int s = 0; s < m; ++s)
      for (int i = 0; i + s < m; ++i) W(o + i + s, o + i) = theta[s];
  }
}

CMatrix build(const JordanSpec& spec, const std::vector<Local>& loc, const std::vector<bool>& active,
              const std::vector<double>& gamma, const std::vector<std::vector<cplx>>& tails) {
  if (static_cast<int>(gamma.size()) != spec.count()) throw ArgumentError("weights: one per declared eigenvalue");
  double sum = 0;
  for (int j = 0; j < spec.count(); ++j) {
    if (gamma[j] < 0) throw ArgumentError("weights must be nonnegative");
    if (!active[j] && gamma[j] != 0.0) throw ArgumentError("inactive eigenvalues must have zero weight");
    sum += gamma[j];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ArgumentError("weights must sum to one");
  CMatrix W = CMatrix::Zero(spec.n(), spec.n());
  for (int j = 0; j < spec.count(); ++j) {
    if (!active[j]) continue;
    const int mj = spec.max_block(j);
    const double n = spec.alg(j);
    std::vector<cplx> theta(mj, 0.0);
    theta[0] = gamma[j] * loc[j].g / n;
    if (mj >= 2) {
      if (static_cast<int>(tails.at(j).size()) < mj - 1) throw ArgumentError("tails too short for the largest block");
      for (int s = 1; s < mj; ++s) theta[s] = tails[j][s - 1];
      cplx g2 = loc[j].g * loc[j].g;
      if (rdot(theta[1], g2) < -gamma[j] * loc[j].eta / n - 1e-12 * std::max(1.0, std::abs(theta[1])))
        throw DomainError("subdiagonal entry violates its halfplane");
    }
    fill_region(W, spec, j, theta);
  }
  return spec.from_W(W);
}

std::vector<double> random_weights(const std::vector<bool>& active, std::mt19937_64& rng) {
  std::exponential_distribution<double> E(1.0);
  int na = static_cast<int>(std::count(active.begin(), active.end(), true));
  std::bernoulli_distribution drop(na > 1 ? 0.2 : 0.0);
  std::vector<double> w(active.size(), 0.0);
  double tot = 0;
  int first = -1;
  for (std::size_t j = 0; j < active.size(); ++j) {
    if (!active[j]) continue;
    if (first < 0) first = static_cast<int>(j);
    tot += (w[j] = drop(rng) ? 0.0 : E(rng));
  }
  if (tot == 0) tot = w[first] = 1.0;
  for (double& x : w) x /= tot;
  return w;
}

// theta_2 with Re(conj(theta_2) g^2) >= floor, optionally on the boundary; deeper entries Gaussian.
std::vector<cplx> random_tail(int mj, cplx g, double floor, bool boundary, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<cplx> t(std::max(mj - 1, 0));
  if (mj >= 2) {
    double g2 = std::norm(g);
    double x = floor / g2 + (boundary ? 0.0 : std::abs(N(rng)));
    cplx u = (g * g) / g2;
    t[0] = cplx(x, N(rng)) * u;
    for (int s = 1; s < mj - 1; ++s) t[s] = {N(rng), N(rng)};
  }
  return t;
}

void require_nonderogatory_active(const JordanSpec& spec, const std::vector<bool>& active, const char* who) {
  for (int j = 0; j < spec.count(); ++j)
    if (active[j] && !spec.nonderogatory(j))
      throw DomainError(std::string(who) + ": active eigenvalue is derogatory");
}

// Shared structural part: regular Toeplitz pattern, zero inactive regions.
MembershipReport structural(const JordanSpec& spec, const CMatrix& Y, const std::vector<bool>& active,
                            const Tolerances& tol) {
  MembershipReport rep;
  rep.params = W_extract(spec, Y, Level::regular, tol);
  rep.violations = rep.params.violations;
  const CMatrix W = spec.to_W(Y);
  const double ts = structural_tol(tol, W);
  if (rep.params.inactive_norm > ts) add(rep.violations, "inactive_zero", rep.params.inactive_norm);
  for (int j = 0; j < spec.count(); ++j) {
    if (active[j]) continue;
    double r = W.block(spec.offset(j), spec.offset(j), spec.alg(j), spec.alg(j)).norm();
    if (r > ts) add(rep.violations, "inactive_zero", r);
  }
  rep.sigma.assign(spec.count(), 0.0);
  return rep;
}

MembershipReport finish(MembershipReport rep) {
  rep.member = rep.violations.empty();
  return rep;
}

// The regular-subgradient conditions on theta_j1 and theta_j2 given local data.
MembershipReport regular_conditions(const JordanSpec& spec, const CMatrix& Y, const std::vector<bool>& active,
                                    const std::vector<Local>& loc, const Tolerances& tol) {
  MembershipReport rep = structural(spec, Y, active, tol);
  const double ts = structural_tol(tol, spec.to_W(Y));
  double total = 0;
  for (int j = 0; j < spec.count(); ++j) {
    if (!active[j]) continue;
    const auto& th = rep.params.theta[j];
    cplx g = loc[j].g;
    cplx sig = th[0] / g;
    if (std::abs(sig.imag()) * std::abs(g) > ts) add(rep.violations, "sigma_real", std::abs(sig.imag()));
    if (sig.real() < -tol.inequality) add(rep.violations, "sigma_nonneg", -sig.real());
    rep.sigma[j] = sig.real();
    total += spec.alg(j) * sig.real();
    if (spec.max_block(j) >= 2) {
      double lhs = rdot(th[1], g * g), rhs = -sig.real() * loc[j].eta;
      if (lhs < rhs - tol.inequality) add(rep.violations, "subdiagonal", rhs - lhs);
    }
  }
  if (std::abs(total - 1.0) > tol.simplex) add(rep.violations, "sigma_sum", std::abs(total - 1.0));
  return finish(std::move(rep));
}

MembershipReport recession_conditions(const JordanSpec& spec, const CMatrix& Y, const std::vector<bool>& active,
                                      const std::vector<Local>& loc, const Tolerances& tol) {
  MembershipReport rep = structural(spec, Y, active, tol);
  const double ts = structural_tol(tol, spec.to_W(Y));
  for (int j = 0; j < spec.count(); ++j) {
    if (!active[j]) continue;
    const auto& th = rep.params.theta[j];
    if (std::abs(th[0]) > ts) add(rep.violations, "diagonal_zero", std::abs(th[0]));
    if (spec.max_block(j) >= 2) {
      double lhs = rdot(th[1], loc[j].g * loc[j].g);
      if (lhs < -tol.inequality) add(rep.violations, "subdiagonal", -lhs);
    }
  }
  return finish(std::move(rep));
}

std::vector<Local> curvature_locals(const JordanSpec& spec, const Generator& f, const std::vector<bool>& active) {
  std::vector<Local> loc(spec.count(), Local{0.0, 0.0});
  for (int j = 0; j < spec.count(); ++j)
    if (active[j]) loc[j] = curvature_local(f, spec.lambda(j));
  return loc;
}

std::vector<Local> radius_locals(const JordanSpec& spec, const std::vector<bool>& active) {
  std::vector<Local> loc(spec.count(), Local{0.0, 0.0});
  for (int j = 0; j < spec.count(); ++j)
    if (active[j]) loc[j] = radius_local(spec.lambda(j));
  return loc;
}

ActiveInfo radius_classify(const JordanSpec& spec) {
  auto a = classify(spec, [](cplx z) { return std::abs(z); });
  if (!(a.value > 0.0)) throw DomainError("spectral radius is zero; use the nilpotent case");
  return a;
}

void require_nilpotent(const JordanSpec& spec) {
  if (spec.count() != 1 || spec.n0() != 0 || spec.lambda(0) != cplx(0.0))
    throw DomainError("nilpotent case needs a single declared eigenvalue 0 and no B");
}

bool is_radius(const Generator& f) { return f.name() == "radius"; }

}  // namespace

double spectral_max(const CMatrix& X, const Generator& f) {
  if (X.rows() != X.cols() || X.rows() == 0) throw ArgumentError("spectral_max: X must be square");
  double m = -kInf;
  for (cplx l : eigenvalues(X)) m = std::max(m, f.value(l));
  return m;
}

ToeplitzParams W_extract(const JordanSpec& spec, const CMatrix& Y, Level level, const Tolerances& tol) {
  if (Y.rows() != spec.n() || Y.cols() != spec.n()) throw ArgumentError("W_extract: Y has the wrong size");
  const CMatrix W = spec.to_W(Y);
  const double ts = structural_tol(tol, W);
  ToeplitzParams tp;
  std::vector<int> region(spec.n(), -1);
  for (int j = 0; j < spec.count(); ++j)
    for (int i = 0; i < spec.alg(j); ++i) region[spec.offset(j) + i] = j;
  double off = 0;
  for (int r = 0; r < spec.n(); ++r)
    for (int c = 0; c < spec.n(); ++c)
      if (region[r] != region[c]) off += std::norm(W(r, c));
  off = std::sqrt(off);
  if (off > ts) add(tp.violations, "block_diagonal", off);
  if (spec.n0() > 0) tp.inactive_norm = W.topLeftCorner(spec.n0(), spec.n0()).norm();

  double zero2 = 0, toep2 = 0, eq2 = 0;
  for (int j = 0; j < spec.count(); ++j) {
    const auto& blocks = spec.eigs()[j].blocks;
    const int q = static_cast<int>(blocks.size()), mj = spec.max_block(j);
    std::vector<cplx> sum(mj, 0.0);
    std::vector<int> cnt(mj, 0);
    std::vector<std::vector<cplx>> diag_means(q);
    for (int r = 0; r < q; ++r)
      for (int s = 0; s < q; ++s) {
        const int mr = blocks[r], ms = blocks[s];
        auto sub = W.block(spec.block_offset(j, r), spec.block_offset(j, s), mr, ms);
        if (level == Level::regular && r != s) {
          zero2 += sub.squaredNorm();
          continue;
        }
        const int dmin = level == Level::regular ? 0 : std::max(0, mr - ms);
        std::vector<cplx> mean(mr, 0.0);
        std::vector<int> c(mr, 0);
        for (int k = 0; k < mr; ++k)
          for (int l = 0; l < ms; ++l) {
            int d = k - l;
            if (d < dmin) {
              zero2 += std::norm(sub(k, l));
            } else {
              mean[d] += sub(k, l);
              ++c[d];
            }
          }
        for (int d = 0; d < mr; ++d)
          if (c[d]) mean[d] /= static_cast<double>(c[d]);
        for (int k = 0; k < mr; ++k)
          for (int l = 0; l < ms; ++l)
            if (k - l >= dmin) toep2 += std::norm(sub(k, l) - mean[k - l]);
        if (r == s) {
          for (int d = 0; d < mr; ++d) {
            sum[d] += static_cast<double>(c[d]) * mean[d];
            cnt[d] += c[d];
          }
          diag_means[r] = mean;
        }
      }
    std::vector<cplx> theta(mj, 0.0);
    for (int d = 0; d < mj; ++d)
      if (cnt[d]) theta[d] = sum[d] / static_cast<double>(cnt[d]);
    if (level == Level::regular)
      for (int r = 0; r < q; ++r)
        for (int d = 0; d < blocks[r]; ++d)
          eq2 += (blocks[r] - d) * std::norm(diag_means[r][d] - theta[d]);
    tp.theta.push_back(std::move(theta));
  }
  if (std::sqrt(zero2) > ts) add(tp.violations, "zero_pattern", std::sqrt(zero2));
  if (std::sqrt(toep2) > ts) add(tp.violations, "toeplitz", std::sqrt(toep2));
  if (std::sqrt(eq2) > ts) add(tp.violations, "equal_diagonals", std::sqrt(eq2));
  return tp;
}

MembershipReport rsd_membership(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                const Tolerances& tol) {
  auto a = classify(spec, f);
  return regular_conditions(spec, Y, a.active, curvature_locals(spec, f, a.active), tol);
}

MembershipReport rsd_recession_membership(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                          const Tolerances& tol) {
  auto a = classify(spec, f);
  return recession_conditions(spec, Y, a.active, curvature_locals(spec, f, a.active), tol);
}

CMatrix regular_build(const JordanSpec& spec, const Generator& f, const std::vector<double>& gamma,
                      const std::vector<std::vector<cplx>>& tails) {
  auto a = classify(spec, f);
  return build(spec, curvature_locals(spec, f, a.active), a.active, gamma, tails);
}

CMatrix regular_sample(const JordanSpec& spec, const Generator& f, std::mt19937_64& rng, double boundary_prob) {
  auto a = classify(spec, f);
  auto loc = curvature_locals(spec, f, a.active);
  auto w = random_weights(a.active, rng);
  std::bernoulli_distribution on_edge(boundary_prob);
  std::vector<std::vector<cplx>> tails(spec.count());
  for (int j = 0; j < spec.count(); ++j)
    if (a.active[j])
      tails[j] = random_tail(spec.max_block(j), loc[j].g, -w[j] * loc[j].eta / spec.alg(j), on_edge(rng), rng);
  return build(spec, loc, a.active, w, tails);
}

CMatrix rsd_sample(const JordanSpec& spec, const Generator& f, const std::vector<double>& gamma,
                   std::mt19937_64& rng) {
  auto a = classify(spec, f);
  require_nonderogatory_active(spec, a.active, "rsd_sample");
  auto loc = curvature_locals(spec, f, a.active);
  std::vector<std::vector<cplx>> tails(spec.count());
  for (int j = 0; j < spec.count(); ++j)
    if (a.active[j])
      tails[j] = random_tail(spec.max_block(j), loc[j].g, -gamma.at(j) * loc[j].eta / spec.alg(j), false, rng);
  return build(spec, loc, a.active, gamma, tails);
}

CMatrix recession_sample(const JordanSpec& spec, const Generator& f, std::mt19937_64& rng) {
  std::function<double(cplx)> val = [&](cplx z) { return f.value(z); };
  auto a = classify(spec, val);
  std::vector<Local> loc = is_radius(f) ? radius_locals(spec, a.active) : curvature_locals(spec, f, a.active);
  CMatrix W = CMatrix::Zero(spec.n(), spec.n());
  for (int j = 0; j < spec.count(); ++j) {
    if (!a.active[j]) continue;
    const int mj = spec.max_block(j);
    std::vector<cplx> theta(mj, 0.0);
    auto t = random_tail(mj, loc[j].g, 0.0, false, rng);
    for (int s = 1; s < mj; ++s) theta[s] = t[s - 1];
    fill_region(W, spec, j, theta);
  }
  return spec.from_W(W);
}

CMatrix radius_build(const JordanSpec& spec, const std::vector<double>& gamma,
                     const std::vector<std::vector<cplx>>& tails) {
  auto a = radius_classify(spec);
  return build(spec, radius_locals(spec, a.active), a.active, gamma, tails);
}

CMatrix radius_sample(const JordanSpec& spec, std::mt19937_64& rng, double boundary_prob) {
  auto a = radius_classify(spec);
  auto loc = radius_locals(spec, a.active);
  auto w = random_weights(a.active, rng);
  std::bernoulli_distribution on_edge(boundary_prob);
  std::vector<std::vector<cplx>> tails(spec.count());
  for (int j = 0; j < spec.count(); ++j)
    if (a.active[j])
      tails[j] = random_tail(spec.max_block(j), loc[j].g, -w[j] * loc[j].eta / spec.alg(j), on_edge(rng), rng);
  return build(spec, loc, a.active, w, tails);
}

CMatrix radius_zero_sample(const JordanSpec& spec, std::mt19937_64& rng, double boundary_prob) {
  require_nilpotent(spec);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  const int m = spec.max_block(0);
  std::vector<cplx> theta(m);
  double r = (U(rng) < boundary_prob ? 1.0 : U(rng)) / spec.n();
  theta[0] = std::polar(r, 2 * std::numbers::pi * U(rng));
  for (int s = 1; s < m; ++s) theta[s] = {N(rng), N(rng)};
  CMatrix W = CMatrix::Zero(spec.n(), spec.n());
  fill_region(W, spec, 0, theta);
  return spec.from_W(W);
}

namespace {

MembershipReport chain_rule_common(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                   const Tolerances& tol, bool horizon) {
  auto af = active_factor(spec, f);
  if (!af.spec.all_nonderogatory()) throw DomainError("chain rule route needs nonderogatory active eigenvalues");
  MembershipReport rep;
  rep.sigma.assign(spec.count(), 0.0);
  auto fit = R_range_fit(af.spec, Y);
  const double ts = structural_tol(tol, af.spec.to_W(Y));
  if (fit.residual > ts) add(rep.violations, "range", fit.residual);
  BlockVector c = BlockVector::zeros(af.ptilde);
  for (std::size_t k = 0; k < af.active.size(); ++k) c.blocks[af.root_of[k]] = fit.v.blocks[k];
  if (horizon) {
    if (!dp_horizon_membership(af.ptilde, f, c, ts)) add(rep.violations, "taylor_horizon", 0.0);
  } else {
    auto d = dp_check(af.ptilde, f, c, ts);
    if (!d.member) add(rep.violations, "taylor_set: " + d.reason, 0.0);
    for (std::size_t k = 0; k < af.active.size(); ++k)
      rep.sigma[af.active[k]] = d.gamma[af.root_of[k]] / spec.alg(af.active[k]);
  }
  return finish(std::move(rep));
}

}  // namespace

MembershipReport chain_rule_membership(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                       const Tolerances& tol) {
  return chain_rule_common(spec, f, Y, tol, false);
}

MembershipReport chain_rule_horizon_membership(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                               const Tolerances& tol) {
  return chain_rule_common(spec, f, Y, tol, true);
}

RepresentationReport representation_membership(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                               bool strict, const Tolerances& tol) {
  auto a = classify(spec, f);
  require_nonderogatory_active(spec, a.active, "representation_membership");
  RepresentationReport rr;
  rr.adopted = rsd_membership(spec, f, Y, tol).member;
  if (strict) {
    // W = P^{-*} Y P reinterpreted through from_W, with the diagonal sign flipped.
    CMatrix Wlit = spec.P_inv().adjoint() * Y * spec.P();
    CMatrix Yalt = -spec.from_W(Wlit);
    rr.literal = rsd_membership(spec, f, Yalt, tol).member;
    rr.literal_evaluated = true;
  }
  return rr;
}

MembershipReport radius_rsd_membership(const JordanSpec& spec, const CMatrix& Y, const Tolerances& tol) {
  auto a = radius_classify(spec);
  MembershipReport rep = structural(spec, Y, a.active, tol);
  const double ts = structural_tol(tol, spec.to_W(Y));
  double total = 0;
  for (int j = 0; j < spec.count(); ++j) {
    if (!a.active[j]) continue;
    const cplx lam = spec.lambda(j);
    const double r = std::abs(lam);
    const auto& th = rep.params.theta[j];
    cplx q = th[0] / lam;
    if (std::abs(q.imag()) * r > ts) add(rep.violations, "ratio_real", std::abs(q.imag()));
    if (q.real() < -tol.inequality) add(rep.violations, "ratio_nonneg", -q.real());
    rep.sigma[j] = q.real() * r;
    total += spec.alg(j) * q.real() * r;
    if (spec.max_block(j) >= 2) {
      double lhs = rdot(th[1], lam * lam), rhs = -q.real() * r * r;
      if (lhs < rhs - tol.inequality) add(rep.violations, "subdiagonal", rhs - lhs);
    }
  }
  if (std::abs(total - 1.0) > tol.simplex) add(rep.violations, "weight_sum", std::abs(total - 1.0));
  return finish(std::move(rep));
}

MembershipReport radius_rsd_horizon_membership(const JordanSpec& spec, const CMatrix& Y, const Tolerances& tol) {
  auto a = radius_classify(spec);
  MembershipReport rep = structural(spec, Y, a.active, tol);
  const double ts = structural_tol(tol, spec.to_W(Y));
  for (int j = 0; j < spec.count(); ++j) {
    if (!a.active[j]) continue;
    const cplx lam = spec.lambda(j);
    const auto& th = rep.params.theta[j];
    if (std::abs(th[0]) > ts) add(rep.violations, "diagonal_zero", std::abs(th[0]));
    if (spec.max_block(j) >= 2) {
      double lhs = rdot(th[1], lam * lam);
      if (lhs < -tol.inequality) add(rep.violations, "subdiagonal", -lhs);
    }
  }
  return finish(std::move(rep));
}

MembershipReport radius_rsd_zero(const JordanSpec& spec, const CMatrix& Y, const Tolerances& tol) {
  require_nilpotent(spec);
  MembershipReport rep = structural(spec, Y, {true}, tol);
  double t1 = std::abs(rep.params.theta[0][0]), bound = 1.0 / spec.n();
  if (t1 > bound + tol.inequality) add(rep.violations, "diagonal_bound", t1 - bound);
  rep.sigma[0] = t1;
  return finish(std::move(rep));
}

MembershipReport radius_rsd_zero_horizon(const JordanSpec& spec, const CMatrix& Y, const Tolerances& tol) {
  require_nilpotent(spec);
  MembershipReport rep = structural(spec, Y, {true}, tol);
  double t1 = std::abs(rep.params.theta[0][0]);
  if (t1 > structural_tol(tol, spec.to_W(Y))) add(rep.violations, "diagonal_zero", t1);
  return finish(std::move(rep));
}

MembershipReport radius_membership(const JordanSpec& spec, const CMatrix& Y, const Tolerances& tol) {
  if (spec.count() == 1 && spec.n0() == 0 && spec.lambda(0) == cplx(0.0)) return radius_rsd_zero(spec, Y, tol);
  return radius_rsd_membership(spec, Y, tol);
}

RegularityVerdict regularity_verdict(const JordanSpec& spec, const Generator& f, double active_tol) {
  auto a = classify(spec, [&](cplx z) { return f.value(z); }, active_tol);
  RegularityVerdict v;
  for (int j = 0; j < spec.count(); ++j) {
    if (!a.active[j]) continue;
    v.active.push_back(j);
    if (!spec.nonderogatory(j)) v.derogatory_active.push_back(j);
  }
  v.regular = v.derogatory_active.empty();
  return v;
}

namespace {

MembershipReport member_for(const JordanSpec& spec, const Generator& f, const CMatrix& Y, const Tolerances& tol) {
  return is_radius(f) ? radius_membership(spec, Y, tol) : rsd_membership(spec, f, Y, tol);
}

}  // namespace

Witness derogatory_witness(const JordanSpec& spec, const Generator& f, int K, int eig, int block,
                           const Tolerances& tol) {
  if (K < 1) throw ArgumentError("derogatory_witness: K must be positive");
  auto v = regularity_verdict(spec, f);
  if (eig < 0) {
    if (v.derogatory_active.empty()) throw DomainError("derogatory_witness: no derogatory active eigenvalue");
    eig = v.derogatory_active.front();
  } else if (std::find(v.derogatory_active.begin(), v.derogatory_active.end(), eig) == v.derogatory_active.end()) {
    throw DomainError("derogatory_witness: chosen eigenvalue is not a derogatory active one");
  }
  const auto& blocks = spec.eigs()[eig].blocks;
  if (block < 0 || block >= static_cast<int>(blocks.size())) throw ArgumentError("derogatory_witness: block out of range");
  const cplx lam = spec.lambda(eig);
  const int mk = blocks[block], bo = spec.block_offset(eig, block);
  const bool at_zero = is_radius(f) && lam == cplx(0.0);

  cplx dir = 1.0;
  auto grad_at = [&](cplx z) -> cplx {
    if (is_radius(f)) return z / std::abs(z);
    auto g = f.gradient(z);
    if (!g) throw UnsupportedGenerator("derogatory_witness: generator not differentiable");
    return *g;
  };
  if (!at_zero) {
    cplx g = grad_at(lam);
    if (g == cplx(0.0)) throw DomainError("derogatory_witness: gradient vanishes");
    dir = g / std::abs(g);
  }
  CMatrix E = CMatrix::Zero(spec.n(), spec.n());
  for (int i = 0; i < mk; ++i) E(bo + i, bo + i) = 1.0;

  Witness w;
  w.eig = eig;
  w.block = block;
  w.M = (at_zero ? cplx(1.0) : grad_at(lam)) / static_cast<double>(mk) * spec.from_W(E);
  w.regular_at_base = member_for(spec, f, w.M, tol).member;

  // Layout at X^nu: B, regions in order with the split block removed, then the split block.
  std::vector<int> perm;
  for (int r = 0; r < spec.n0(); ++r) perm.push_back(r);
  std::vector<EigenBlocks> eigs;
  for (int j = 0; j < spec.count(); ++j) {
    EigenBlocks e = spec.eigs()[j];
    for (int k = 0; k < spec.geo(j); ++k) {
      if (j == eig && k == block) continue;
      for (int i = 0; i < spec.eigs()[j].blocks[k]; ++i) perm.push_back(spec.block_offset(j, k) + i);
    }
    if (j == eig) e.blocks.erase(e.blocks.begin() + block);
    eigs.push_back(std::move(e));
  }
  for (int i = 0; i < mk; ++i) perm.push_back(bo + i);

  w.all_members = true;
  for (int nu = 1; nu <= K; ++nu) {
    WitnessStep st;
    st.nu = nu;
    const cplx shift = dir / static_cast<double>(nu);
    const cplx lnu = lam + shift;
    st.X = spec.from_V(spec.J() + shift * E);
    auto e = eigs;
    e.push_back({lnu, {mk}});
    st.spec = spec.permuted(e, spec.B(), perm);
    cplx th = (at_zero ? cplx(1.0) : grad_at(lnu)) / static_cast<double>(mk);
    st.M = th * spec.from_W(E);
    st.member = member_for(st.spec, f, st.M, tol).member;
    st.distance = (st.M - w.M).norm();
    w.all_members = w.all_members && st.member;
    w.steps.push_back(std::move(st));
  }
  return w;
}

}  // namespace smax
