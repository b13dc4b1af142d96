#pragma once

#include <random>
#include <string>
#include <vector>

#include "smax/generators.hpp"
#include "smax/matrix_jordan.hpp"

namespace smax {

/// Tolerances for matrix membership tests.
/// structural: entries forced to zero or equal, relative to max(1, ||W||_F).
/// simplex:    the weight-sum equality.
/// inequality: slack on one-sided inequalities.
struct Tolerances {
  double structural = 1e-9;
  double simplex = 1e-8;
  double inequality = 1e-10;
};

// phi(X) = max f over the eigenvalues of X.
double spectral_max(const CMatrix& X, const Generator& f);

enum class Level { limiting, regular };

struct Violation {
  std::string condition;
  double residual = 0.0;
};

/// Structure of W = P^{-*} Y P^* relative to the declared Jordan layout.
/// theta[j][s] is the s-th subdiagonal value (s = 0 is the diagonal) averaged over the
/// diagonal sub-blocks of region j; length m_j.
struct ToeplitzParams {
  std::vector<std::vector<cplx>> theta;
  double inactive_norm = 0.0;  // Frobenius norm of the B region
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ToeplitzParams W_extract(const JordanSpec& spec, const CMatrix& Y, Level level,
                         const Tolerances& tol = {});

struct MembershipReport {
  bool member = false;
  std::vector<Violation> violations;
  std::vector<double> sigma;  // per declared eigenvalue; zero when inactive
  ToeplitzParams params;
};

// Regular subdifferential of phi at spec.X(). f must satisfy the curvature condition with a
// nonzero gradient at every active eigenvalue; eigenvalues of B must be inactive.
MembershipReport rsd_membership(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                const Tolerances& tol = {});
MembershipReport rsd_recession_membership(const JordanSpec& spec, const Generator& f,
                                          const CMatrix& Y, const Tolerances& tol = {});

// Member built from weights gamma (one per declared eigenvalue, zero when inactive, summing
// to one) and explicit deeper diagonals: tails[j][s] is theta_{j,s+2}. Derogatory regions
// share the diagonals across sub-blocks. Throws DomainError when theta_{j2} is infeasible.
CMatrix regular_build(const JordanSpec& spec, const Generator& f, const std::vector<double>& gamma,
                      const std::vector<std::vector<cplx>>& tails);
// Random member; boundary_prob is the chance that theta_{j2} sits on its halfplane boundary.
CMatrix regular_sample(const JordanSpec& spec, const Generator& f, std::mt19937_64& rng,
                       double boundary_prob = 0.2);
// As regular_sample with fixed weights; rejects derogatory active eigenvalues.
CMatrix rsd_sample(const JordanSpec& spec, const Generator& f, const std::vector<double>& gamma,
                   std::mt19937_64& rng);
// Random member of the recession cone.
CMatrix recession_sample(const JordanSpec& spec, const Generator& f, std::mt19937_64& rng);

// Spectral radius counterparts (rho > 0): theta_j1 = gamma_j lambda_j / (n_j |lambda_j|).
CMatrix radius_build(const JordanSpec& spec, const std::vector<double>& gamma,
                     const std::vector<std::vector<cplx>>& tails);
CMatrix radius_sample(const JordanSpec& spec, std::mt19937_64& rng, double boundary_prob = 0.2);
// Nilpotent case: shared Toeplitz diagonals with |theta_1| <= 1/n.
CMatrix radius_zero_sample(const JordanSpec& spec, std::mt19937_64& rng, double boundary_prob = 0.2);

// Nonderogatory route: pull Y back through R and test the Taylor coordinates in D.
MembershipReport chain_rule_membership(const JordanSpec& spec, const Generator& f, const CMatrix& Y,
                                       const Tolerances& tol = {});
MembershipReport chain_rule_horizon_membership(const JordanSpec& spec, const Generator& f,
                                               const CMatrix& Y, const Tolerances& tol = {});

// Explicit representation check for nonderogatory actives. The adopted reading puts
// +gamma_j grad/n_j on the diagonal of W = P^{-*} Y P^*; the literal alternative reading uses
// -gamma_j grad/n_j with W = P^{-*} Y P. Strict mode evaluates both.
struct RepresentationReport {
  bool adopted = false;
  bool literal = false;
  bool literal_evaluated = false;
};
RepresentationReport representation_membership(const JordanSpec& spec, const Generator& f,
                                               const CMatrix& Y, bool strict,
                                               const Tolerances& tol = {});

// Spectral radius with rho > 0 and its horizon cone.
MembershipReport radius_rsd_membership(const JordanSpec& spec, const CMatrix& Y,
                                       const Tolerances& tol = {});
MembershipReport radius_rsd_horizon_membership(const JordanSpec& spec, const CMatrix& Y,
                                               const Tolerances& tol = {});
// Spectral radius at a nilpotent matrix (single declared eigenvalue 0, no B).
MembershipReport radius_rsd_zero(const JordanSpec& spec, const CMatrix& Y, const Tolerances& tol = {});
MembershipReport radius_rsd_zero_horizon(const JordanSpec& spec, const CMatrix& Y,
                                         const Tolerances& tol = {});
// Dispatches among the three radius cases.
MembershipReport radius_membership(const JordanSpec& spec, const CMatrix& Y, const Tolerances& tol = {});

struct RegularityVerdict {
  bool regular = false;
  std::vector<int> active;
  std::vector<int> derogatory_active;
};
RegularityVerdict regularity_verdict(const JordanSpec& spec, const Generator& f,
                                     double active_tol = kActiveTol);

struct WitnessStep {
  int nu = 0;
  CMatrix X;
  CMatrix M;  // regular subgradient at X
  JordanSpec spec;
  bool member = false;
  double distance = 0.0;  // ||M_nu - M||_F
};

/// Limiting subgradient M that is not regular, with the approximating sequence.
struct Witness {
  int eig = -1;
  int block = 0;
  CMatrix M;
  bool regular_at_base = true;
  bool all_members = false;
  std::vector<WitnessStep> steps;
};

// Uses the first derogatory active eigenvalue unless eig >= 0; block picks the sub-block
// that splits off. The perturbation is 1/nu along the gradient (or along 1 at radius 0).
Witness derogatory_witness(const JordanSpec& spec, const Generator& f, int K, int eig = -1,
                           int block = 0, const Tolerances& tol = {});

}  // namespace smax
