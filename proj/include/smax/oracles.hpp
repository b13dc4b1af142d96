#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smax/generators.hpp"
#include "smax/matrix_jordan.hpp"
#include "smax/poly.hpp"
#include "smax/spec_subdiff.hpp"

namespace smax {

// Batch kernels run either as a plain loop or as an OpenMP loop over samples. Every sample
// draws from its own seeded stream, so both produce identical results.
enum class Exec { serial, parallel };

// Independent evaluations in extended precision (long double Schur iteration).
double spectral_max_extended(const CMatrix& X, const Generator& f);
double root_max_extended(const Poly& p, const Generator& f);

/// One-sided difference quotients (g(t) - g(0)) / t over a decreasing grid.
struct FDReport {
  std::vector<double> t;
  std::vector<double> quotients;
  double extrapolated = 0.0;     // linear extrapolation to t = 0 from the last two points
  double growth_exponent = 0.0;  // least-squares slope of log|q| against log t
  bool unbounded = false;        // growth_exponent <= -0.4
};

FDReport fd_phi_quotient(const CMatrix& X, const Generator& f, const CMatrix& Z, std::span<const double> t_grid);
FDReport fd_poly_quotient(const RootCluster& pt, const Generator& f, const Poly& v, std::span<const double> t_grid);

// Central differences of char_poly(X + tZ) at t = 0 with one Richardson step.
Poly fd_char_poly_derivative(const CMatrix& X, const CMatrix& Z, double h = 1e-3);

// Slack c * t^{1/m}, c = 10 * the largest observed slope of q against t^{1/m}.
double calibrated_slack_constant(std::span<const double> t, std::span<const double> q, int m);

struct InequalityReport {
  int samples = 0;
  int violations = 0;
  double max_violation = 0.0;  // largest (<Y,Z> - q(t) - slack); <= 0 when none
  int worst_sample = -1;
  std::vector<double> radii;
};

// Re<Y, Z> <= (phi(X + tZ) - phi(X)) / t + c t^{1/m} + 1e-8 over random unit directions Z.
InequalityReport subgradient_inequality_suite(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                              int n_samples, std::span<const double> radii, std::uint64_t seed,
                                              Exec exec = Exec::parallel);

// Per radius r: max over sampled |D| = r of (Re<Y, D> - (phi(X + D) - phi(X)))_+ / r.
std::vector<double> regular_gap(const JordanSpec& spec, const Generator& f, const CMatrix& Y, int n_samples,
                                std::span<const double> radii, std::uint64_t seed, Exec exec = Exec::parallel);

/// Agreement of the direct characterization with the chain-rule route.
struct AgreementReport {
  int members = 0;
  int nonmembers = 0;
  int member_rejected_direct = 0;
  int member_rejected_chain = 0;
  int nonmember_accepted_direct = 0;
  int nonmember_accepted_chain = 0;
  int disagreements() const {
    return member_rejected_direct + member_rejected_chain + nonmember_accepted_direct + nonmember_accepted_chain;
  }
};

// n members from regular_sample plus n structured perturbations that leave the set.
AgreementReport cross_oracle_agreement(const JordanSpec& spec, const Generator& f, int n, std::uint64_t seed,
                                       Exec exec = Exec::parallel);

}  // namespace smax
