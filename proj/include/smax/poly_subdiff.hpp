#pragma once

#include <string>
#include <vector>

#include "smax/factorization.hpp"
#include "smax/generators.hpp"
#include "smax/poly.hpp"

namespace smax {

inline constexpr double kSimplexTol = 1e-8;

/// Verdict for the Taylor-coordinate set D at a root cluster.
///
/// gamma holds a feasible weight per root (zero for inactive roots) when member is true.
struct DpReport {
  bool member = false;
  std::vector<double> gamma;
  std::string reason;
};

// Membership of Taylor coordinates c in D: head zero, inactive blocks zero, and weights
// gamma_j >= 0 summing to one with block j in gamma_j * Gamma_j (closure at gamma_j = 0).
// Decided exactly: each gamma_j ranges over an interval, so feasibility is an interval sum test.
DpReport dp_check(const RootCluster& pt, const Generator& f, const BlockVector& c,
                  double tol = 1e-8, double active_tol = kActiveTol);
bool dp_membership(const RootCluster& pt, const Generator& f, const BlockVector& c,
                   double tol = 1e-8, double active_tol = kActiveTol);
// {0} x prod(Gamma_j^inf) on active roots, zero elsewhere.
bool dp_horizon_membership(const RootCluster& pt, const Generator& f, const BlockVector& c,
                           double tol = 1e-8, double active_tol = kActiveTol);
SetDescriptor dp_set(const RootCluster& pt, const Generator& f, double active_tol = kActiveTol);

// Regular subdifferential of the root max function at pt, tested on a polynomial v.
bool rsd_f_membership(const RootCluster& pt, const Generator& f, const Poly& v, double tol = 1e-8);
bool rsd_f_horizon_membership(const RootCluster& pt, const Generator& f, const Poly& v,
                              double tol = 1e-8);

// Closed-form subderivative; +inf when the direction leaves the finite domain.
double subderivative_f(const RootCluster& pt, const Generator& f, const Poly& v, double tol = 1e-9);
// Same for f = |.| at a cluster with nonzero maximal modulus.
double subderivative_radius(const RootCluster& pt, const Poly& v, double tol = 1e-9);

}  // namespace smax
