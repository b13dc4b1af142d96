#include "smax/json_io.hpp"

#include <fstream>

namespace smax::io {

cplx to_cplx(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ArgumentError("expected a complex number [re, im], got " + j.dump());
}

json from_cplx(cplx z) { return json::array({z.real(), z.imag()}); }

Poly to_poly(const json& j) {
  if (!j.is_array() || j.empty()) throw ArgumentError("polynomial must be a nonempty coefficient array");
  std::vector<cplx> c;
  for (const auto& e : j) c.push_back(to_cplx(e));
  return Poly(std::move(c));
}

json from_poly(const Poly& p) {
  json a = json::array();
  for (cplx c : p.coeffs()) a.push_back(from_cplx(c));
  return a;
}

CMatrix to_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw ArgumentError("matrix must be a nonempty array of rows");
  const std::size_t n = j.size();
  std::size_t cols = 0;
  for (const auto& row : j) {
    if (!row.is_array()) throw ArgumentError("matrix rows must be arrays");
    if (cols == 0) cols = row.size();
    if (row.size() != cols || cols == 0) throw ArgumentError("matrix rows must have equal nonzero length");
  }
  CMatrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < cols; ++c) M(r, c) = to_cplx(j[r][c]);
  return M;
}

json from_matrix(const CMatrix& M) {
  json a = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(from_cplx(M(r, c)));
    a.push_back(std::move(row));
  }
  return a;
}

JordanSpec to_spec(const json& j) {
  if (!j.is_object() || !j.contains("eigs") || !j["eigs"].is_array())
    throw ArgumentError("spec must be an object with an \"eigs\" array");
  std::vector<EigenBlocks> eigs;
  for (const auto& e : j["eigs"]) {
    if (!e.is_object() || !e.contains("lambda") || !e.contains("blocks") || !e["blocks"].is_array())
      throw ArgumentError("each eigenvalue needs \"lambda\" and \"blocks\"");
    EigenBlocks eb{to_cplx(e["lambda"]), {}};
    for (const auto& b : e["blocks"]) {
      if (!b.is_number_integer()) throw ArgumentError("block sizes must be integers");
      eb.blocks.push_back(b.get<int>());
    }
    eigs.push_back(std::move(eb));
  }
  CMatrix P, B;
  if (j.contains("P") && !j["P"].is_null()) P = to_matrix(j["P"]);
  if (j.contains("B") && !j["B"].is_null() && !j["B"].empty()) B = to_matrix(j["B"]);
  return JordanSpec(std::move(eigs), std::move(P), std::move(B));
}

json from_spec(const JordanSpec& s) {
  json eigs = json::array();
  for (const auto& e : s.eigs()) eigs.push_back({{"lambda", from_cplx(e.lambda)}, {"blocks", e.blocks}});
  json out = {{"eigs", eigs}, {"P", from_matrix(s.P())}};
  if (s.n0() > 0) out["B"] = from_matrix(s.B());
  return out;
}

RootCluster to_cluster(const json& j) {
  if (!j.is_object() || !j.contains("roots") || !j["roots"].is_array())
    throw ArgumentError("root cluster must be an object with a \"roots\" array");
  std::vector<cplx> r;
  std::vector<int> m;
  for (const auto& e : j["roots"]) {
    if (!e.contains("lambda")) throw ArgumentError("each root needs \"lambda\"");
    r.push_back(to_cplx(e["lambda"]));
    m.push_back(e.contains("mult") ? e["mult"].get<int>() : 1);
  }
  return RootCluster::make(std::move(r), std::move(m));
}

json from_cluster(const RootCluster& rc) {
  json a = json::array();
  for (int j = 0; j < rc.size(); ++j) a.push_back({{"lambda", from_cplx(rc.roots[j])}, {"mult", rc.mult[j]}});
  return {{"roots", a}};
}

CMatrix AffineFamily::at(const std::vector<double>& theta) const {
  if (theta.size() != A.size()) throw ArgumentError("family: parameter count mismatch");
  CMatrix X = A0;
  for (std::size_t k = 0; k < A.size(); ++k) X += theta[k] * A[k];
  return X;
}

AffineFamily to_family(const json& j) {
  if (!j.is_object() || !j.contains("A0") || !j.contains("A") || !j["A"].is_array())
    throw ArgumentError("family must have \"A0\" and an \"A\" array");
  AffineFamily fam;
  fam.A0 = to_matrix(j["A0"]);
  if (fam.A0.rows() != fam.A0.cols()) throw ArgumentError("family: A0 must be square");
  for (const auto& a : j["A"]) {
    fam.A.push_back(to_matrix(a));
    if (fam.A.back().rows() != fam.A0.rows() || fam.A.back().cols() != fam.A0.cols())
      throw ArgumentError("family: all matrices must share the size of A0");
  }
  return fam;
}

json from_report(const MembershipReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"condition", x.condition}, {"residual", x.residual}});
  json th = json::array();
  for (const auto& t : r.params.theta) {
    json row = json::array();
    for (cplx z : t) row.push_back(from_cplx(z));
    th.push_back(row);
  }
  return {{"member", r.member}, {"violations", v}, {"sigma", r.sigma}, {"theta", th}};
}

json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ArgumentError("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace smax::io
