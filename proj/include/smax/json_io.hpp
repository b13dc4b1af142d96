#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "smax/matrix_jordan.hpp"
#include "smax/poly.hpp"
#include "smax/spec_subdiff.hpp"

namespace smax::io {

using nlohmann::json;

// Complex scalars are [re, im]; a bare number is accepted as a real scalar.
cplx to_cplx(const json& j);
json from_cplx(cplx z);

// Coefficient arrays, index equal to the power.
Poly to_poly(const json& j);
json from_poly(const Poly& p);

// Row-major array of rows.
CMatrix to_matrix(const json& j);
json from_matrix(const CMatrix& M);

// {"eigs":[{"lambda":[re,im],"blocks":[2,1]}, ...], "P":[[...]], "B":[[...]]}
JordanSpec to_spec(const json& j);
json from_spec(const JordanSpec& s);

// {"roots":[{"lambda":[re,im],"mult":k}, ...]}
RootCluster to_cluster(const json& j);
json from_cluster(const RootCluster& rc);

// {"A0": matrix, "A": [matrix, ...]}
struct AffineFamily {
  CMatrix A0;
  std::vector<CMatrix> A;
  CMatrix at(const std::vector<double>& theta) const;
};
AffineFamily to_family(const json& j);

json from_report(const MembershipReport& r);

// Parses a file; wraps parse and shape errors into ArgumentError.
json load(const std::string& path);

}  // namespace smax::io
