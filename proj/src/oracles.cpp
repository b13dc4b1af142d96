#include "smax/oracles.hpp"

#include <algorithm>
#include <array>
#include <exception>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "smax/sampling.hpp"

namespace smax {
namespace {

using ldcplx = std::complex<long double>;
using LDMatrix = Eigen::Matrix<ldcplx, Eigen::Dynamic, Eigen::Dynamic>;

std::vector<cplx> eig_extended(const LDMatrix& A) {
  Eigen::ComplexEigenSolver<LDMatrix> es(A, false);
  if (es.info() != Eigen::Success) throw DomainError("extended eigenvalue iteration failed");
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    ldcplx z = es.eigenvalues()(i);
    out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return out;
}

double max_f(const std::vector<cplx>& ev, const Generator& f) {
  double m = -kInf;
  for (cplx z : ev) m = std::max(m, f.value(z));
  return m;
}

FDReport summarize(std::vector<double> t, std::vector<double> q) {
  FDReport r;
  r.t = std::move(t);
  r.quotients = std::move(q);
  const std::size_t k = r.t.size();
  if (k >= 2) {
    double t1 = r.t[k - 2], t2 = r.t[k - 1], q1 = r.quotients[k - 2], q2 = r.quotients[k - 1];
    r.extrapolated = (t1 * q2 - t2 * q1) / (t1 - t2);
  } else if (k == 1) {
    r.extrapolated = r.quotients[0];
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double aq = std::abs(r.quotients[i]);
    if (aq == 0.0) continue;
    double x = std::log(r.t[i]), y = std::log(aq);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2) r.growth_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  r.unbounded = cnt >= 3 && r.growth_exponent <= -0.4;
  return r;
}

int active_max_block(const JordanSpec& spec, const Generator& f) {
  double v = -kInf;
  for (int j = 0; j < spec.count(); ++j) v = std::max(v, f.value(spec.lambda(j)));
  int m = 1;
  for (int j = 0; j < spec.count(); ++j)
    if (f.value(spec.lambda(j)) >= v - kActiveTol) m = std::max(m, spec.max_block(j));
  return m;
}

// Exceptions cannot cross an OpenMP region; the first one is rethrown afterwards.
template <class Body>
void run(int n, Exec exec, Body&& body) {
  std::exception_ptr err;
  auto guarded = [&](int i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(smax_run_error)
      if (!err) err = std::current_exception();
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) guarded(i);
  } else {
    for (int i = 0; i < n; ++i) guarded(i);
  }
  if (err) std::rethrow_exception(err);
}

// Stream identifiers keep the suites independent of one another.
constexpr std::uint64_t kDirStream = 0x51;
constexpr std::uint64_t kGapStream = 0x52;
constexpr std::uint64_t kAgreeStream = 0x53;

}  // namespace

double spectral_max_extended(const CMatrix& X, const Generator& f) {
  return max_f(eig_extended(X.cast<ldcplx>()), f);
}

double root_max_extended(const Poly& p, const Generator& f) {
  int n = p.degree();
  if (n < 1) throw ArgumentError("root_max_extended: polynomial must be nonconstant");
  LDMatrix C = LDMatrix::Zero(n, n);
  ldcplx lead(p.coeff(n).real(), p.coeff(n).imag());
  for (int k = 0; k < n; ++k) {
    cplx c = p.coeff(n - 1 - k);
    C(0, k) = -ldcplx(c.real(), c.imag()) / lead;
  }
  for (int k = 1; k < n; ++k) C(k, k - 1) = 1.0L;
  return max_f(eig_extended(C), f);
}

FDReport fd_phi_quotient(const CMatrix& X, const Generator& f, const CMatrix& Z, std::span<const double> t_grid) {
  if (X.rows() != Z.rows() || X.cols() != Z.cols()) throw ArgumentError("fd_phi_quotient: size mismatch");
  const double base = spectral_max_extended(X, f);
  std::vector<double> t, q;
  for (double s : t_grid) {
    t.push_back(s);
    q.push_back((spectral_max_extended(X + s * Z, f) - base) / s);
  }
  return summarize(std::move(t), std::move(q));
}

FDReport fd_poly_quotient(const RootCluster& pt, const Generator& f, const Poly& v, std::span<const double> t_grid) {
  const Poly p = pt.to_poly();
  if (v.degree() > p.degree()) throw ArgumentError("fd_poly_quotient: direction degree too high");
  const double base = root_max_extended(p, f);
  std::vector<double> t, q;
  for (double s : t_grid) {
    t.push_back(s);
    q.push_back((root_max_extended(p + v * cplx(s), f) - base) / s);
  }
  return summarize(std::move(t), std::move(q));
}

Poly fd_char_poly_derivative(const CMatrix& X, const CMatrix& Z, double h) {
  auto central = [&](double s) { return (char_poly(X + s * Z) - char_poly(X - s * Z)) * cplx(0.5 / s); };
  Poly d1 = central(h), d2 = central(h / 2);
  return (d2 * cplx(4.0) - d1) * cplx(1.0 / 3.0);
}

double calibrated_slack_constant(std::span<const double> t, std::span<const double> q, int m) {
  double c = 0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    double dt = std::abs(std::pow(t[k], 1.0 / m) - std::pow(t[k + 1], 1.0 / m));
    if (dt > 0) c = std::max(c, std::abs(q[k] - q[k + 1]) / dt);
  }
  return 10.0 * c;
}

InequalityReport subgradient_inequality_suite(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                              int n_samples, std::span<const double> radii, std::uint64_t seed,
                                              Exec exec) {
  const CMatrix X = spec.X();
  const int n = spec.n();
  const int m = active_max_block(spec, f);
  const double base = spectral_max_extended(X, f);
  std::vector<double> viol(n_samples, -kInf);
  run(n_samples, exec, [&](int i) {
    auto rng = stream(seed, kDirStream, static_cast<std::uint64_t>(i));
    CMatrix Z = random_direction(n, rng);
    double lhs = frob_rinner(Y, Z);
    std::vector<double> q;
    for (double t : radii) q.push_back((spectral_max_extended(X + t * Z, f) - base) / t);
    double c = calibrated_slack_constant(radii, q, m);
    double worst = -kInf;
    for (std::size_t k = 0; k < radii.size(); ++k)
      worst = std::max(worst, lhs - q[k] - c * std::pow(radii[k], 1.0 / m) - 1e-8);
    viol[i] = worst;
  });
  InequalityReport rep;
  rep.samples = n_samples;
  rep.radii.assign(radii.begin(), radii.end());
  rep.max_violation = -kInf;
  for (int i = 0; i < n_samples; ++i) {
    if (viol[i] > 0) ++rep.violations;
    if (viol[i] > rep.max_violation) {
      rep.max_violation = viol[i];
      rep.worst_sample = i;
    }
  }
  return rep;
}

std::vector<double> regular_gap(const JordanSpec& spec, const Generator& f, const CMatrix& Y, int n_samples,
                                std::span<const double> radii, std::uint64_t seed, Exec exec) {
  const CMatrix X = spec.X();
  const double base = spectral_max_extended(X, f);
  const int nr = static_cast<int>(radii.size());
  std::vector<double> gaps(static_cast<std::size_t>(n_samples) * nr, 0.0);
  run(n_samples, exec, [&](int i) {
    auto rng = stream(seed, kGapStream, static_cast<std::uint64_t>(i));
    CMatrix Z = random_direction(spec.n(), rng);
    for (int k = 0; k < nr; ++k) {
      double r = radii[k];
      double g = (r * frob_rinner(Y, Z) - (spectral_max_extended(X + r * Z, f) - base)) / r;
      gaps[static_cast<std::size_t>(i) * nr + k] = std::max(g, 0.0);
    }
  });
  std::vector<double> out(nr, 0.0);
  for (int i = 0; i < n_samples; ++i)
    for (int k = 0; k < nr; ++k) out[k] = std::max(out[k], gaps[static_cast<std::size_t>(i) * nr + k]);
  return out;
}

namespace {

// Moves a member outside the set in one of four structured ways.
CMatrix perturb_out(const JordanSpec& spec, const Generator& f, const CMatrix& Y, int kind) {
  CMatrix W = spec.to_W(Y);
  double v = -kInf;
  for (int j = 0; j < spec.count(); ++j) v = std::max(v, f.value(spec.lambda(j)));
  std::vector<int> active;
  for (int j = 0; j < spec.count(); ++j)
    if (f.value(spec.lambda(j)) >= v - kActiveTol) active.push_back(j);
  int with_sub = -1;
  for (int j : active)
    if (spec.max_block(j) >= 2) with_sub = j;
  if (kind == 2 && with_sub < 0) kind = 0;
  if (kind == 1 && spec.n() < 2) kind = 0;
  switch (kind) {
    case 0:  // weights no longer sum to one
      return 1.5 * Y;
    case 1: {  // entry outside the lower-triangular pattern
      int j = active.front();
      int o = spec.offset(j);
      if (spec.alg(j) >= 2) {
        W(o, o + 1) += 0.25;
      } else {
        int other = (o == 0) ? 1 : 0;
        W(o, other) += 0.25;
      }
      return spec.from_W(W);
    }
    case 2: {  // subdiagonal pushed across its halfplane
      int j = with_sub, o = spec.offset(j);
      cplx g = *f.gradient(spec.lambda(j));
      cplx g2 = g * g;
      double sigma = (W(o, o) / g).real();
      double lhs = rdot(W(o + 1, o), g2), rhs = -sigma * curvature_eta(f, spec.lambda(j));
      double delta = rhs - 0.5 * std::norm(g) - lhs;
      cplx shift = delta * g2 / std::norm(g2);
      for (int i = 0; i + 1 < spec.alg(j); ++i) W(o + i + 1, o + i) += shift;
      return spec.from_W(W);
    }
    default: {  // diagonal rotated off the gradient ray
      int j = active.front(), o = spec.offset(j);
      cplx rot = std::polar(1.0, 0.3);
      cplx d = W(o, o);
      if (std::abs(d) < 1e-6) d = 0.2 * *f.gradient(spec.lambda(j)), rot = cplx(0, 1);
      for (int i = 0; i < spec.alg(j); ++i) W(o + i, o + i) = d * rot;
      return spec.from_W(W);
    }
  }
}

}  // namespace

AgreementReport cross_oracle_agreement(const JordanSpec& spec, const Generator& f, int n, std::uint64_t seed,
                                       Exec exec) {
  std::vector<std::array<int, 4>> flags(n, {0, 0, 0, 0});
  run(n, exec, [&](int i) {
    auto rng = stream(seed, kAgreeStream, static_cast<std::uint64_t>(i));
    CMatrix Y = regular_sample(spec, f, rng);
    flags[i][0] = !rsd_membership(spec, f, Y).member;
    flags[i][1] = !chain_rule_membership(spec, f, Y).member;
    CMatrix Yo = perturb_out(spec, f, Y, i % 4);
    flags[i][2] = rsd_membership(spec, f, Yo).member;
    flags[i][3] = chain_rule_membership(spec, f, Yo).member;
  });
  AgreementReport r;
  r.members = r.nonmembers = n;
  for (auto& fl : flags) {
    r.member_rejected_direct += fl[0];
    r.member_rejected_chain += fl[1];
    r.nonmember_accepted_direct += fl[2];
    r.nonmember_accepted_chain += fl[3];
  }
  return r;
}

}  // namespace smax
