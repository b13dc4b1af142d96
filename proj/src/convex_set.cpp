#include "smax/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace smax {
namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Andrew's monotone chain; returns CCW hull without repeated endpoint.
std::vector<cplx> convex_hull(std::vector<cplx> p) {
  std::sort(p.begin(), p.end(), [](cplx a, cplx b) { return lex_less(a, b); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  std::vector<cplx> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

// Intersect [lo, hi] with {s : a*s <= b}.
void clip(double a, double b, double& lo, double& hi) {
  if (a > 0) {
    hi = std::min(hi, b / a);
  } else if (a < 0) {
    lo = std::max(lo, b / a);
  } else if (b < 0) {
    lo = 1.0;
    hi = 0.0;
  }
}

// Outward halfplanes of a CCW polygon as (normal, offset) pairs.
std::vector<std::pair<cplx, double>> polygon_faces(const std::vector<cplx>& v) {
  std::vector<std::pair<cplx, double>> faces;
  for (std::size_t i = 0; i < v.size(); ++i) {
    cplx e = v[(i + 1) % v.size()] - v[i];
    cplx n(e.imag(), -e.real());
    n /= std::abs(n);
    faces.emplace_back(n, rdot(n, v[i]));
  }
  return faces;
}

double seg_distance(cplx z, cplx a, cplx b) {
  cplx d = b - a;
  double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(z - a);
  double u = std::clamp(rdot(d, z - a) / len2, 0.0, 1.0);
  return std::abs(z - (a + u * d));
}

}  // namespace

ConvexSet2D ConvexSet2D::point(cplx p) {
  ConvexSet2D s;
  s.kind_ = Kind::point;
  s.pts_ = {p};
  return s;
}

ConvexSet2D ConvexSet2D::segment(cplx a, cplx b) {
  if (a == b) return point(a);
  ConvexSet2D s;
  s.kind_ = Kind::segment;
  s.pts_ = {a, b};
  return s;
}

ConvexSet2D ConvexSet2D::polygon(std::vector<cplx> pts) {
  if (pts.empty()) throw ArgumentError("polygon needs at least one vertex");
  auto hull = convex_hull(std::move(pts));
  if (hull.size() == 1) return point(hull[0]);
  if (hull.size() == 2) return segment(hull[0], hull[1]);
  ConvexSet2D s;
  s.kind_ = Kind::polygon;
  s.pts_ = std::move(hull);
  return s;
}

ConvexSet2D ConvexSet2D::halfplane(cplx normal, double offset) {
  if (normal == cplx(0.0)) throw ArgumentError("halfplane normal must be nonzero");
  ConvexSet2D s;
  s.kind_ = Kind::halfplane;
  s.vec_ = normal;
  s.scalar_ = offset;
  return s;
}

ConvexSet2D ConvexSet2D::line(cplx through, cplx direction) {
  if (direction == cplx(0.0)) return point(through);
  ConvexSet2D s;
  s.kind_ = Kind::line;
  s.pts_ = {through};
  s.vec_ = direction / std::abs(direction);
  return s;
}

ConvexSet2D ConvexSet2D::plane() { return ConvexSet2D(); }

ConvexSet2D ConvexSet2D::disk(cplx center, double radius) {
  if (!(radius >= 0.0)) throw ArgumentError("disk radius must be nonnegative");
  if (radius == 0.0) return point(center);
  ConvexSet2D s;
  s.kind_ = Kind::disk;
  s.pts_ = {center};
  s.scalar_ = radius;
  return s;
}

bool ConvexSet2D::contains(cplx z, double tol) const {
  switch (kind_) {
    case Kind::point:
      return std::abs(z - pts_[0]) <= tol;
    case Kind::segment:
      return seg_distance(z, pts_[0], pts_[1]) <= tol;
    case Kind::polygon:
      for (auto& [n, b] : polygon_faces(pts_))
        if (rdot(n, z) > b + tol) return false;
      return true;
    case Kind::halfplane:
      return rdot(vec_, z) <= scalar_ + tol * std::abs(vec_);
    case Kind::line:
      return std::abs(cross(vec_, z - pts_[0])) <= tol;
    case Kind::plane:
      return true;
    case Kind::disk:
      return std::abs(z - pts_[0]) <= scalar_ + tol;
  }
  return false;
}

double ConvexSet2D::support(cplx d) const {
  if (d == cplx(0.0)) return 0.0;
  switch (kind_) {
    case Kind::point:
      return rdot(pts_[0], d);
    case Kind::segment:
    case Kind::polygon: {
      double best = -kInf;
      for (cplx v : pts_) best = std::max(best, rdot(v, d));
      return best;
    }
    case Kind::halfplane: {
      // Bounded only along the outward normal.
      if (std::abs(cross(vec_, d)) > 1e-14 * std::abs(vec_) * std::abs(d) || rdot(vec_, d) < 0)
        return kInf;
      return scalar_ * std::abs(d) / std::abs(vec_);
    }
    case Kind::line:
      if (std::abs(rdot(vec_, d)) > 1e-14 * std::abs(d)) return kInf;
      return rdot(pts_[0], d);
    case Kind::plane:
      return kInf;
    case Kind::disk:
      return rdot(pts_[0], d) + scalar_ * std::abs(d);
  }
  return kInf;
}

bool ConvexSet2D::contains_origin_interior() const {
  switch (kind_) {
    case Kind::point:
    case Kind::segment:
    case Kind::line:
      return false;
    case Kind::polygon:
      for (auto& [n, b] : polygon_faces(pts_))
        if (!(b > 0.0)) return false;
      return true;
    case Kind::halfplane:
      return scalar_ > 0.0;
    case Kind::plane:
      return true;
    case Kind::disk:
      return std::abs(pts_[0]) < scalar_;
  }
  return false;
}

bool ConvexSet2D::spans_plane() const {
  if (contains_origin_interior()) return true;
  switch (kind_) {
    case Kind::halfplane:
      // Boundary line through the origin: the closed half-circle of directions covers C.
      return scalar_ == 0.0;
    case Kind::polygon: {
      // Origin on the relative interior of an edge.
      for (std::size_t i = 0; i < pts_.size(); ++i) {
        cplx a = pts_[i], b = pts_[(i + 1) % pts_.size()];
        if (a != cplx(0.0) && b != cplx(0.0) && seg_distance(0.0, a, b) == 0.0) return true;
      }
      return false;
    }
    default:
      return false;
  }
}

std::pair<double, double> ConvexSet2D::ray_interval(cplx x, double tol) const {
  double lo = 0.0, hi = kInf;
  switch (kind_) {
    case Kind::point: {
      cplx p = pts_[0];
      clip(x.real(), p.real() + tol, lo, hi);
      clip(-x.real(), -p.real() + tol, lo, hi);
      clip(x.imag(), p.imag() + tol, lo, hi);
      clip(-x.imag(), -p.imag() + tol, lo, hi);
      break;
    }
    case Kind::segment: {
      cplx a = pts_[0], d = pts_[1] - pts_[0];
      double len = std::abs(d);
      cplx u = d / len;
      // Across the supporting line.
      clip(cross(u, x), cross(u, a) + tol, lo, hi);
      clip(-cross(u, x), -cross(u, a) + tol, lo, hi);
      // Along the segment.
      clip(rdot(u, x), rdot(u, a) + len + tol, lo, hi);
      clip(-rdot(u, x), -rdot(u, a) + tol, lo, hi);
      break;
    }
    case Kind::polygon:
      for (auto& [n, b] : polygon_faces(pts_)) clip(rdot(n, x), b + tol, lo, hi);
      break;
    case Kind::halfplane:
      clip(rdot(vec_, x) / std::abs(vec_), scalar_ / std::abs(vec_) + tol, lo, hi);
      break;
    case Kind::line:
      clip(cross(vec_, x), cross(vec_, pts_[0]) + tol, lo, hi);
      clip(-cross(vec_, x), -cross(vec_, pts_[0]) + tol, lo, hi);
      break;
    case Kind::plane:
      break;
    case Kind::disk: {
      // |s x - c|^2 <= (r + tol)^2  <=>  a s^2 - 2 b s + c2 <= 0.
      double a = std::norm(x), b = rdot(x, pts_[0]);
      double c2 = std::norm(pts_[0]) - (scalar_ + tol) * (scalar_ + tol);
      if (a == 0.0) {
        if (c2 > 0) return {1.0, 0.0};
        break;
      }
      double disc = b * b - a * c2;
      if (disc < 0) return {1.0, 0.0};
      double sq = std::sqrt(disc);
      lo = std::max(lo, (b - sq) / a);
      hi = std::min(hi, (b + sq) / a);
      break;
    }
  }
  return {lo, hi};
}

cplx ConvexSet2D::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);
  switch (kind_) {
    case Kind::point:
      return pts_[0];
    case Kind::segment:
      return pts_[0] + U(rng) * (pts_[1] - pts_[0]);
    case Kind::polygon: {
      std::exponential_distribution<double> E(1.0);
      std::vector<double> w(pts_.size());
      double tot = 0;
      for (auto& wi : w) tot += (wi = E(rng));
      cplx z = 0;
      for (std::size_t i = 0; i < pts_.size(); ++i) z += (w[i] / tot) * pts_[i];
      return z;
    }
    case Kind::halfplane: {
      cplx n = vec_ / std::abs(vec_);
      cplx base = n * (scalar_ / std::abs(vec_));
      return base - n * std::abs(N(rng)) + n * cplx(0, 1) * N(rng);
    }
    case Kind::line:
      return pts_[0] + vec_ * N(rng);
    case Kind::plane:
      return {N(rng), N(rng)};
    case Kind::disk: {
      double r = scalar_ * std::sqrt(U(rng));
      return pts_[0] + std::polar(r, 2.0 * std::numbers::pi * U(rng));
    }
  }
  return 0.0;
}

std::string ConvexSet2D::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::point:
      os << "point" << pts_[0];
      break;
    case Kind::segment:
      os << "segment" << pts_[0] << pts_[1];
      break;
    case Kind::polygon:
      os << "polygon";
      for (cplx v : pts_) os << v;
      break;
    case Kind::halfplane:
      os << "halfplane{Re(conj" << vec_ << " z)<=" << scalar_ << "}";
      break;
    case Kind::line:
      os << "line" << pts_[0] << "+R" << vec_;
      break;
    case Kind::plane:
      os << "plane";
      break;
    case Kind::disk:
      os << "disk" << pts_[0] << "r=" << scalar_;
      break;
  }
  return os.str();
}

}  // namespace smax
