#pragma once

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace insdel {

// Deterministic RNG. All variates are derived from raw mt19937_64 output by
// hand so that a fixed seed gives bit-identical streams across standard
// library implementations (std::uniform_real_distribution and friends are
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform on [0, 1), 53-bit resolution
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform on the open interval (0, 1); safe to pass to log()
  double u01_open() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // uniform integer in [0, n), unbiased via masked rejection
  std::int64_t below(std::int64_t n) {
    assert(n > 0);
    const auto un = static_cast<std::uint64_t>(n);
    if (un == 1) return 0;
    const std::uint64_t mask = std::bit_ceil(un) - 1;
    for (;;) {
      const std::uint64_t v = gen_() & mask;
      if (v < un) return static_cast<std::int64_t>(v);
    }
  }

  double exponential() { return -std::log(u01_open()); }

  double normal() {
    const double u1 = u01_open();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive independent child seeds from the one
// user-facing seed without correlating streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// geometric number of failures before the first success, P(X=k) = p(1-p)^k,
// exact inverse-CDF draw
inline std::int64_t sample_geometric(double p, Rng& rng) {
  assert(p > 0.0 && p <= 1.0);
  if (p >= 1.0) return 0;
  const double u = rng.u01_open();
  return static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

// negative binomial: failures before the r-th success, as a sum of r
// geometric draws
inline std::int64_t sample_negative_binomial(std::int64_t r, double p,
                                             Rng& rng) {
  assert(r >= 1);
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < r; ++i) total += sample_geometric(p, rng);
  return total;
}

// index draw from unnormalized nonnegative weights
inline int sample_from_weights(std::span<const double> w, Rng& rng) {
  double total = 0.0;
  for (double x : w) total += x;
  assert(total > 0.0);
  double u = rng.u01() * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    u -= w[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(w.size() - 1);
}

}  // namespace insdel
