#include "smax/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace smax {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index) {
  return std::mt19937_64(substream_seed(seed, stream_id, index));
}

CMatrix random_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  CMatrix Z(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) Z(r, c) = {N(rng), N(rng)};
  return Z / Z.norm();
}

namespace {

std::vector<int> random_partition(int total, int parts, std::mt19937_64& rng) {
  std::vector<int> p(parts, 1);
  std::uniform_int_distribution<int> pick(0, parts - 1);
  for (int i = parts; i < total; ++i) ++p[pick(rng)];
  return p;
}

bool separated(const std::vector<cplx>& pts, cplx z, double sep) {
  for (cplx p : pts)
    if (std::abs(p - z) < sep) return false;
  return true;
}

}  // namespace

JordanSpec random_spec(const Generator& f, std::mt19937_64& rng, const RandomSpecOptions& opt) {
  const std::string& g = f.name();
  const bool modulus = g == "radius" || g == "radius2";
  if (!modulus && g != "abscissa") throw ArgumentError("random_spec: unsupported generator geometry");
  std::uniform_int_distribution<int> nd(opt.min_n, opt.max_n);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> N(0.0, 1.0);

  for (;;) {
    const int n = nd(rng);
    const int m = std::uniform_int_distribution<int>(1, n)(rng);
    auto alg = random_partition(n, m, rng);
    const int na = std::uniform_int_distribution<int>(1, std::min(m, opt.max_active))(rng);

    std::vector<cplx> lams;
    for (int j = 0; j < m; ++j) {
      for (int tries = 0; tries < 1000; ++tries) {
        cplx z;
        if (j < na) {
          z = modulus ? std::polar(1.0, 2 * std::numbers::pi * U(rng)) : cplx(1.0, 4 * U(rng) - 2);
        } else {
          z = modulus ? std::polar(0.1 + 0.6 * U(rng), 2 * std::numbers::pi * U(rng))
                      : cplx(-1.0 + 1.7 * U(rng), 4 * U(rng) - 2);
        }
        if (separated(lams, z, 0.15)) {
          lams.push_back(z);
          break;
        }
      }
    }
    if (static_cast<int>(lams.size()) != m) continue;

    std::vector<EigenBlocks> eigs;
    bool any_derog = false;
    for (int j = 0; j < m; ++j) {
      std::vector<int> blocks{alg[j]};
      if (opt.derogatory && alg[j] >= 2 && (opt.force_derogatory || U(rng) < 0.5)) {
        int q = std::uniform_int_distribution<int>(2, alg[j])(rng);
        blocks = random_partition(alg[j], q, rng);
        std::sort(blocks.rbegin(), blocks.rend());
        any_derog = true;
      }
      eigs.push_back({lams[j], blocks});
    }
    if (opt.force_derogatory && !any_derog) continue;
    // Shuffle declaration order so actives are not always first.
    std::shuffle(eigs.begin(), eigs.end(), rng);

    CMatrix P = CMatrix::Identity(n, n);
    if (!opt.identity_P) {
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) P(r, c) += 0.4 / std::sqrt(n) * cplx(N(rng), N(rng));
    }
    try {
      JordanSpec spec(eigs, P);
      if (spec.cond_P() > opt.max_cond) continue;
      return spec;
    } catch (const DomainError&) {
      continue;
    }
  }
}

}  // namespace smax
