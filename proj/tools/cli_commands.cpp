#include "cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "smax/generators.hpp"
#include "smax/json_io.hpp"
#include "smax/matrix_jordan.hpp"
#include "smax/oracles.hpp"
#include "smax/poly_subdiff.hpp"
#include "smax/sampling.hpp"
#include "smax/spec_subdiff.hpp"

namespace smax::cli {
namespace {

using io::json;

struct Global {
  double tol = 1e-9;
  std::uint64_t seed = 1;
  bool json_out = false;
  std::string out_path;
};

// Non-finite values are written as strings so the output stays valid JSON.
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Tolerances tolerances(const Global& g) {
  Tolerances t;
  t.structural = g.tol;
  return t;
}

bool is_radius(const Generator& f) { return f.name() == "radius"; }

bool nilpotent_radius_case(const JordanSpec& spec) {
  return spec.count() == 1 && spec.n0() == 0 && spec.lambda(0) == cplx(0.0);
}

json eigen_list(const std::vector<cplx>& ev) {
  json a = json::array();
  for (cplx z : ev) a.push_back(io::from_cplx(z));
  return a;
}

constexpr double kFdGrid[] = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};

json fd_json(const FDReport& r) {
  json q = json::array();
  for (double x : r.quotients) q.push_back(num(x));
  return {{"t", r.t}, {"quotients", q}, {"extrapolated", num(r.extrapolated)},
          {"growth_exponent", num(r.growth_exponent)}, {"unbounded", r.unbounded}};
}

// ---------------------------------------------------------------- eval

int cmd_eval(const std::string& path, const Generator& f, json& out) {
  CMatrix X = io::to_matrix(io::load(path));
  if (X.rows() != X.cols()) throw ArgumentError("matrix must be square");
  auto ev = eigenvalues(X);
  double value = -kInf;
  for (cplx z : ev) value = std::max(value, f.value(z));
  json active = json::array();
  for (cplx z : ev)
    if (f.value(z) >= value - kActiveTol) active.push_back(io::from_cplx(z));
  out = {{"command", "eval"}, {"f", f.name()}, {"value", num(value)}, {"eigenvalues", eigen_list(ev)},
         {"active", active}};
  return kOk;
}

// ---------------------------------------------------------------- membership

MembershipReport membership_report(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                   const std::string& set, const Tolerances& tol) {
  if (set == "rsd") return is_radius(f) ? radius_membership(spec, Y, tol) : rsd_membership(spec, f, Y, tol);
  if (set == "recession") {
    if (!is_radius(f)) return rsd_recession_membership(spec, f, Y, tol);
    return nilpotent_radius_case(spec) ? radius_rsd_zero_horizon(spec, Y, tol)
                                       : radius_rsd_horizon_membership(spec, Y, tol);
  }
  if (set == "limiting-structure") {
    MembershipReport r;
    r.params = W_extract(spec, Y, Level::limiting, tol);
    r.violations = r.params.violations;
    r.member = r.violations.empty();
    return r;
  }
  if (set == "chain") return chain_rule_membership(spec, f, Y, tol);
  throw ArgumentError("unknown set '" + set + "'");
}

int cmd_membership(const std::string& spec_path, const std::string& y_path, const Generator& f,
                   const std::string& set, bool strict, const Global& g, json& out) {
  JordanSpec spec = io::to_spec(io::load(spec_path));
  CMatrix Y = io::to_matrix(io::load(y_path));
  if (Y.rows() != spec.n() || Y.cols() != spec.n()) throw ArgumentError("Y must match the spec size");
  const Tolerances tol = tolerances(g);
  MembershipReport rep = membership_report(spec, f, Y, set, tol);
  out = io::from_report(rep);
  out["command"] = "membership";
  out["set"] = set;
  out["f"] = f.name();
  if (strict && set == "rsd" && !is_radius(f)) {
    auto rr = representation_membership(spec, f, Y, true, tol);
    out["representation"] = {{"adopted", rr.adopted}, {"literal", rr.literal}};
  }
  return rep.member ? kOk : kNotMember;
}

// ---------------------------------------------------------------- subderivative

RootCluster cluster_from(const json& j) {
  if (j.is_object()) return io::to_cluster(j);
  Poly p = io::to_poly(j);
  if (p.degree() < 1) throw ArgumentError("base polynomial must be nonconstant");
  cplx lead = p.coeff(p.degree());
  if (std::abs(lead - cplx(1.0)) > 1e-12) throw ArgumentError("base polynomial must be monic");
  return roots(p);
}

int cmd_subderivative_poly(const std::string& base_path, const std::string& v_path, const Generator& f,
                           json& out) {
  RootCluster pt = cluster_from(io::load(base_path));
  Poly v = io::to_poly(io::load(v_path));
  if (v.degree() >= pt.degree()) throw ArgumentError("direction degree must be below the base degree");
  double value;
  if (is_radius(f)) {
    value = subderivative_radius(pt, v);
  } else {
    value = subderivative_f(pt, f, v);
  }
  FDReport fd = fd_poly_quotient(pt, f, v, kFdGrid);
  out = {{"command", "subderivative"}, {"variant", "poly"}, {"f", f.name()}, {"base", io::from_cluster(pt)},
         {"value", num(value)}, {"fd", fd_json(fd)}};
  return kOk;
}

int cmd_subderivative_matrix(const std::string& spec_path, const std::string& z_path, const Generator& f,
                             json& out) {
  JordanSpec spec = io::to_spec(io::load(spec_path));
  CMatrix Z = io::to_matrix(io::load(z_path));
  if (Z.rows() != spec.n() || Z.cols() != spec.n()) throw ArgumentError("Z must match the spec size");
  FDReport fd = fd_phi_quotient(spec.X(), f, Z, kFdGrid);
  out = {{"command", "subderivative"}, {"variant", "matrix"}, {"f", f.name()}, {"fd", fd_json(fd)}};
  // Chain-rule lower bound through the characteristic polynomial when it applies.
  if (spec.n0() == 0) {
    std::vector<cplx> r;
    std::vector<int> m;
    for (int j = 0; j < spec.count(); ++j) {
      r.push_back(spec.lambda(j));
      m.push_back(spec.alg(j));
    }
    RootCluster pt = RootCluster::make(r, m);
    Poly v = char_poly_deriv_action(spec, Z).resized(spec.n());
    double lb = is_radius(f) ? subderivative_radius(pt, v) : subderivative_f(pt, f, v);
    out["chain_lower_bound"] = num(lb);
  }
  return kOk;
}

// ---------------------------------------------------------------- worked examples

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

JordanSpec spec_A() { return JordanSpec({{1.0, {2}}, {-1.0, {1}}}); }
JordanSpec spec_B() { return JordanSpec({{1.0, {2, 1}}}); }

CMatrix diag3(cplx a, cplx b, cplx c) {
  CMatrix D = CMatrix::Zero(3, 3);
  D(0, 0) = a;
  D(1, 1) = b;
  D(2, 2) = c;
  return D;
}

bool has_violation(const MembershipReport& r, const std::string& name) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const Violation& v) { return v.condition == name; });
}

std::vector<Check> worked_examples(int nu_max, const Tolerances& tol) {
  const Generator rho = Generator::builtin("radius");
  std::vector<Check> out;
  auto add = [&](std::string name, bool pass, std::string detail = "") {
    out.push_back({std::move(name), pass, std::move(detail)});
  };

  const JordanSpec A = spec_A();
  double vA = spectral_max(A.X(), rho);
  add("A: spectral radius equals 1", std::abs(vA - 1.0) < 1e-12);

  Poly diff = char_poly(A.X()) - Poly({1.0, -1.0, -1.0, 1.0});
  bool cp_ok = std::all_of(diff.coeffs().begin(), diff.coeffs().end(), [](cplx c) { return std::abs(c) < 1e-12; });
  add("A: characteristic polynomial is (x-1)^2 (x+1)", cp_ok);

  add("A: subdifferentially regular", regularity_verdict(A, rho).regular);

  add("A: Diag(1/2,1/2,0) is a regular subgradient",
      radius_rsd_membership(A, diag3(0.5, 0.5, 0.0), tol).member);

  auto rI = radius_rsd_membership(A, diag3(1.0, 1.0, 1.0), tol);
  add("A: identity rejected (last diagonal must be nonpositive)", !rI.member);

  CMatrix Y = diag3(0.5, 0.5, 0.0);
  Y(1, 0) = -1.0;
  add("A: subdiagonal -1 with diagonal 1/2 rejected", !radius_rsd_membership(A, Y, tol).member);

  const JordanSpec B = spec_B();
  const CMatrix third = CMatrix::Identity(3, 3) / 3.0;
  add("B: I/3 is a regular subgradient", radius_rsd_membership(B, third, tol).member);

  CMatrix Yb = third;
  Yb(1, 0) = -1.0 / 3.0;
  add("B: I/3 + theta E21 on the boundary Re theta = -1/3 accepted", radius_rsd_membership(B, Yb, tol).member);
  Yb(1, 0) = -1.0 / 3.0 - 1e-3;
  add("B: Re theta = -1/3 - 1e-3 rejected", !radius_rsd_membership(B, Yb, tol).member);

  auto rM = radius_rsd_membership(B, diag3(0.0, 0.0, 1.0), tol);
  add("B: Diag(0,0,1) rejected for unequal diagonals", !rM.member && has_violation(rM, "equal_diagonals"));

  add("B: not subdifferentially regular", !regularity_verdict(B, rho).regular);

  int bad = 0;
  for (int nu = 1; nu <= nu_max; ++nu) {
    CMatrix J2(2, 2);
    J2 << 1.0, 1.0, 0.0, 1.0;
    JordanSpec Bn({{1.0 + 1.0 / nu, {1}}}, CMatrix(), J2);
    if (!radius_membership(Bn, diag3(0.0, 0.0, 1.0), tol).member) ++bad;
  }
  add("B^nu: Diag(0,0,1) is a regular subgradient for nu = 1.." + std::to_string(nu_max), bad == 0,
      std::to_string(bad) + " failures");
  return out;
}

int cmd_worked_examples(int nu, const Global& g, std::ostream& os, json& out, bool& wrote_text) {
  if (nu < 1) throw ArgumentError("--nu must be positive");
  auto checks = worked_examples(nu, tolerances(g));
  bool all = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  if (g.json_out) {
    json a = json::array();
    for (const auto& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}});
    out = {{"command", "paper-examples"}, {"nu", nu}, {"checks", a}, {"all_pass", all}};
  } else {
    for (const auto& c : checks) os << (c.pass ? "PASS  " : "FAIL  ") << c.name << "\n";
    os << (all ? "all " : "") << std::count_if(checks.begin(), checks.end(), [](auto& c) { return c.pass; })
       << "/" << checks.size() << " checks passed\n";
    wrote_text = true;
  }
  return all ? kOk : kNotMember;
}

// ---------------------------------------------------------------- verify

constexpr double kRadii[] = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};

CMatrix sample_member(const JordanSpec& spec, const Generator& f, std::mt19937_64& rng) {
  if (is_radius(f)) return nilpotent_radius_case(spec) ? radius_zero_sample(spec, rng) : radius_sample(spec, rng);
  return regular_sample(spec, f, rng);
}

MembershipReport member_check(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                              const Tolerances& tol) {
  return is_radius(f) ? radius_membership(spec, Y, tol) : rsd_membership(spec, f, Y, tol);
}

int cmd_verify(const std::string& spec_path, const Generator& f, int samples, int members, int nu,
               const Global& g, json& out) {
  if (samples < 1 || members < 1) throw ArgumentError("--samples and --members must be positive");
  JordanSpec spec = io::to_spec(io::load(spec_path));
  const Tolerances tol = tolerances(g);
  bool ok = true;
  auto verdict = regularity_verdict(spec, f);
  out = {{"command", "verify"}, {"f", f.name()}, {"seed", g.seed}, {"samples", samples},
         {"regular", verdict.regular}, {"active", verdict.active}, {"derogatory_active", verdict.derogatory_active}};

  json mem = json::array();
  for (int k = 0; k < members; ++k) {
    auto rng = stream(g.seed, 0x71, static_cast<std::uint64_t>(k));
    CMatrix Y = sample_member(spec, f, rng);
    bool self = member_check(spec, f, Y, tol).member;
    auto ineq = subgradient_inequality_suite(spec, f, Y, samples, kRadii, g.seed + static_cast<std::uint64_t>(k));
    ok = ok && self && ineq.violations == 0;
    mem.push_back({{"self_consistent", self}, {"violations", ineq.violations},
                   {"max_violation", num(ineq.max_violation)}});
  }
  out["inequality_suite"] = mem;

  if (!is_radius(f) && spec.all_nonderogatory() && spec.n0() == 0) {
    bool curvature = true;
    for (int j : verdict.active) curvature = curvature && condition_check(f, spec.lambda(j)) == Condition::curvature;
    if (curvature) {
      auto ag = cross_oracle_agreement(spec, f, std::min(samples, 100), g.seed);
      ok = ok && ag.disagreements() == 0;
      out["cross_oracle"] = {{"members", ag.members}, {"nonmembers", ag.nonmembers},
                             {"disagreements", ag.disagreements()}};
    }
  }

  if (!verdict.derogatory_active.empty()) {
    Witness w = derogatory_witness(spec, f, nu, -1, 0, tol);
    ok = ok && w.all_members && !w.regular_at_base;
    double last = w.steps.empty() ? 0.0 : w.steps.back().distance;
    out["witness"] = {{"eig", w.eig}, {"block", w.block}, {"M", io::from_matrix(w.M)},
                      {"regular_at_base", w.regular_at_base}, {"sequence_members", w.all_members},
                      {"steps", static_cast<int>(w.steps.size())}, {"final_distance", num(last)}};
  }
  out["pass"] = ok;
  return ok ? kOk : kNotMember;
}

// ---------------------------------------------------------------- stabilize

// A subgradient of phi at a generic iterate: declared-structure-free, with an eigenvector
// fallback when eigenvalues are too close to separate.
CMatrix iterate_subgradient(const CMatrix& X, const Generator& f, std::mt19937_64& rng) {
  try {
    JordanSpec spec = JordanSpec::diagonalizable(X);
    std::vector<double> w(spec.count(), 0.0);
    double v = -kInf;
    for (int j = 0; j < spec.count(); ++j) v = std::max(v, f.value(spec.lambda(j)));
    int na = 0;
    for (int j = 0; j < spec.count(); ++j)
      if (f.value(spec.lambda(j)) >= v - kActiveTol) w[j] = 1.0, ++na;
    for (double& x : w) x /= na;
    if (is_radius(f)) return radius_build(spec, w, {});
    return rsd_sample(spec, f, w, rng);
  } catch (const DomainError&) {
  }
  Eigen::ComplexEigenSolver<CMatrix> es(X);
  const auto& ev = es.eigenvalues();
  Eigen::Index k = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (f.value(ev(i)) > f.value(ev(k))) k = i;
  auto grad = f.gradient(ev(k));
  if (!grad) throw DomainError("generator is not differentiable at the top eigenvalue");
  CMatrix V = es.eigenvectors();
  CMatrix left = V.inverse();
  // <G, Z> = left_k Z v_k is the eigenvalue derivative.
  return *grad * left.row(k).adjoint() * V.col(k).adjoint();
}

int cmd_stabilize(const std::string& path, const Generator& f, int iters, const std::string& rule, double step,
                  const Global& g, std::ostream& os) {
  if (iters < 0) throw ArgumentError("--iters must be nonnegative");
  if (step <= 0) throw ArgumentError("--step must be positive");
  io::AffineFamily fam = io::to_family(io::load(path));
  const std::size_t K = fam.A.size();
  std::vector<double> theta(K, 0.0);
  auto rng = stream(g.seed, 0x81);
  os << "iter,phi,best_phi";
  for (std::size_t k = 0; k < K; ++k) os << ",theta_" << (k + 1);
  os << "\n" << std::setprecision(17);
  double best = kInf;
  for (int it = 0; it <= iters; ++it) {
    CMatrix X = fam.at(theta);
    double phi = spectral_max(X, f);
    best = std::min(best, phi);
    os << it << "," << phi << "," << best;
    for (double t : theta) os << "," << t;
    os << "\n";
    if (it == iters) break;
    CMatrix Y = iterate_subgradient(X, f, rng);
    std::vector<double> grad(K);
    double norm2 = 0;
    for (std::size_t k = 0; k < K; ++k) {
      grad[k] = frob_rinner(Y, fam.A[k]);
      norm2 += grad[k] * grad[k];
    }
    if (norm2 == 0.0) continue;
    double alpha = rule == "constant" ? step : step / std::sqrt(it + 1.0);
    for (std::size_t k = 0; k < K; ++k) theta[k] -= alpha * grad[k] / std::sqrt(norm2);
  }
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral max functions: evaluation, subgradients and verification", "smax"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--tol", g.tol, "Structural tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Random seed");
  app.add_flag("--json", g.json_out, "Machine-readable output");
  app.add_option("--out", g.out_path, "Write output to a file");

  std::string fname = "abscissa";
  auto gen_opt = [&](CLI::App* sub) {
    sub->add_option("--f", fname, "Generator: abscissa, radius, radius2, ell1")
        ->check(CLI::IsMember({"abscissa", "radius", "radius2", "ell1"}));
    sub->fallthrough();
  };

  std::string p1, p2, set = "rsd", rule = "diminishing";
  bool strict = false;
  int nu = 100, samples = 500, members = 3, iters = 200;
  double step = 0.5;

  auto* eval = app.add_subcommand("eval", "phi(X), eigenvalues and active set");
  eval->add_option("matrix", p1)->required();
  gen_opt(eval);

  auto* memb = app.add_subcommand("membership", "Subgradient membership test");
  memb->add_option("spec", p1)->required();
  memb->add_option("Y", p2)->required();
  memb->add_option("--set", set)->check(CLI::IsMember({"rsd", "recession", "limiting-structure", "chain"}));
  memb->add_flag("--strict", strict, "Also evaluate the literal representation reading");
  gen_opt(memb);

  auto* sub = app.add_subcommand("subderivative", "Subderivative with a finite-difference cross-check");
  sub->require_subcommand(1);
  sub->fallthrough();
  auto* sub_poly = sub->add_subcommand("poly", "Root max function at a monic polynomial");
  sub_poly->add_option("base", p1, "Root cluster object or monic coefficient array")->required();
  sub_poly->add_option("v", p2, "Direction coefficient array")->required();
  gen_opt(sub_poly);
  auto* sub_mat = sub->add_subcommand("matrix", "Spectral max function at a declared spec");
  sub_mat->add_option("spec", p1)->required();
  sub_mat->add_option("Z", p2)->required();
  gen_opt(sub_mat);

  auto* ex = app.add_subcommand("paper-examples", "Worked examples for A and B as a pass/fail table");
  ex->add_option("--nu", nu, "Length of the B^nu sequence");
  ex->fallthrough();

  auto* ver = app.add_subcommand("verify", "Oracle suite for a spec");
  ver->add_option("spec", p1)->required();
  ver->add_option("--samples", samples, "Directions per member");
  ver->add_option("--members", members, "Sampled subgradients");
  ver->add_option("--nu", nu, "Witness sequence length");
  gen_opt(ver);

  auto* stab = app.add_subcommand("stabilize", "Subgradient descent over an affine family; CSV trajectory");
  stab->add_option("family", p1)->required();
  stab->add_option("--iters", iters);
  stab->add_option("--step-rule", rule)->check(CLI::IsMember({"diminishing", "constant"}));
  stab->add_option("--step", step, "Initial (or constant) step length");
  gen_opt(stab);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  std::ostringstream buf;
  json result;
  bool text = false;
  int code = kOk;
  try {
    const Generator f = Generator::builtin(fname);
    if (eval->parsed()) {
      code = cmd_eval(p1, f, result);
    } else if (memb->parsed()) {
      code = cmd_membership(p1, p2, f, set, strict, g, result);
    } else if (sub_poly->parsed()) {
      code = cmd_subderivative_poly(p1, p2, f, result);
    } else if (sub_mat->parsed()) {
      code = cmd_subderivative_matrix(p1, p2, f, result);
    } else if (ex->parsed()) {
      code = cmd_worked_examples(nu, g, buf, result, text);
    } else if (ver->parsed()) {
      code = cmd_verify(p1, f, samples, members, nu, g, result);
    } else if (stab->parsed()) {
      code = cmd_stabilize(p1, f, iters, rule, step, g, buf);
      text = true;
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  }
  if (!text) buf << result.dump(2) << "\n";

  if (g.out_path.empty()) {
    out << buf.str();
  } else {
    std::ofstream file(g.out_path);
    if (!file) {
      err << "error: cannot write '" << g.out_path << "'\n";
      return kUsage;
    }
    file << buf.str();
  }
  return code;
}

}  // namespace smax::cli
