#pragma once

#include <random>

#include "smax/generators.hpp"
#include "smax/matrix_jordan.hpp"

namespace smax {

struct RandomSpecOptions {
  int min_n = 1;
  int max_n = 5;
  int max_active = 2;
  bool derogatory = false;   // allow several Jordan blocks per eigenvalue
  bool force_derogatory = false;
  bool identity_P = false;
  double max_cond = 50.0;
};

// Random declared Jordan structure for abscissa / radius / radius2 geometry: active
// eigenvalues share the maximal level, inactive ones sit clearly below it, all separated.
JordanSpec random_spec(const Generator& f, std::mt19937_64& rng, const RandomSpecOptions& opt = {});

// Complex Gaussian matrix scaled to unit Frobenius norm.
CMatrix random_direction(int n, std::mt19937_64& rng);

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index = 0);

}  // namespace smax
