#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace smax {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Malformed input: wrong sizes, non-monic where monic is required, bad JSON shape.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mathematically outside the supported domain (regularity, conditioning, preconditions).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Generator fails the structural assumptions the requested formula relies on.
class UnsupportedGenerator : public DomainError {
 public:
  using DomainError::DomainError;
};

class SingularSystem : public DomainError {
 public:
  using DomainError::DomainError;
};

// Real inner product on C viewed as R^2.
inline double rdot(cplx a, cplx b) { return std::real(std::conj(a) * b); }

// Lexicographic order: real part first, then imaginary part.
inline bool lex_leq(cplx a, cplx b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag());
}
inline bool lex_less(cplx a, cplx b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

// <Y, Z> = tr(Y^* Z).
inline cplx frob_inner(const CMatrix& Y, const CMatrix& Z) { return (Y.adjoint() * Z).trace(); }
inline double frob_rinner(const CMatrix& Y, const CMatrix& Z) { return frob_inner(Y, Z).real(); }

// Deterministic per-index stream seeds, independent of iteration order.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

}  // namespace smax
