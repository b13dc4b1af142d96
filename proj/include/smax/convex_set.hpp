#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "smax/core.hpp"

namespace smax {

/// Closed convex subset of C (identified with R^2).
///
/// Halfplanes are stored as {z : Re(conj(normal) z) <= offset}; lines as
/// point + R*direction; polygons as counter-clockwise hull vertices.
class ConvexSet2D {
 public:
  enum class Kind { point, segment, polygon, halfplane, line, plane, disk };

  static ConvexSet2D point(cplx p);
  static ConvexSet2D segment(cplx a, cplx b);
  // Convex hull of the given points; degenerates to segment or point.
  static ConvexSet2D polygon(std::vector<cplx> pts);
  static ConvexSet2D halfplane(cplx normal, double offset);
  static ConvexSet2D line(cplx through, cplx direction);
  static ConvexSet2D plane();
  static ConvexSet2D disk(cplx center, double radius);

  Kind kind() const { return kind_; }
  const std::vector<cplx>& vertices() const { return pts_; }
  cplx normal() const { return vec_; }
  double offset() const { return scalar_; }
  cplx direction() const { return vec_; }
  cplx center() const { return pts_.front(); }
  double radius() const { return scalar_; }

  bool contains(cplx z, double tol = 1e-10) const;
  // sup over s in the set of Re(conj(s) d); +inf when unbounded in that direction.
  double support(cplx d) const;
  bool is_singleton() const { return kind_ == Kind::point; }
  bool is_zero() const { return kind_ == Kind::point && pts_.front() == cplx(0.0); }
  bool contains_origin_interior() const;
  // True when {t*z : t real, z in set} is all of C.
  bool spans_plane() const;

  // {s >= 0 : s*x in set}, widened by tol; returns (lo, hi) with lo > hi when empty.
  std::pair<double, double> ray_interval(cplx x, double tol) const;

  cplx sample(std::mt19937_64& rng) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::plane;
  std::vector<cplx> pts_;
  cplx vec_{0.0, 0.0};
  double scalar_ = 0.0;
};

}  // namespace smax
