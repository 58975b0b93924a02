// SPDX-License-Identifier: Apache-2.0
//
// misodof: degrees-of-freedom laboratory for the K-user MISO broadcast
// channel with delayed and imperfect current CSIT.

#ifndef MISODOF_STREAM_KEY_HPP
#define MISODOF_STREAM_KEY_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace misodof {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Addressable randomness: (master_seed, stream_id, counter) maps to an
/// independent generator state, so trials and grid points can be drawn in any
/// order (or in parallel) and still reproduce bit-for-bit.
struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t counter = 0;

  StreamKey with_stream(std::uint64_t id) const { return {master_seed, id, counter}; }
  StreamKey with_counter(std::uint64_t c) const { return {master_seed, stream_id, c}; }

  std::uint64_t derive_seed() const {
    std::uint64_t h = detail::splitmix64(master_seed);
    h = detail::splitmix64(h ^ detail::splitmix64(stream_id + 0x6A09E667F3BCC909ULL));
    h = detail::splitmix64(h ^ detail::splitmix64(counter + 0xBB67AE8584CAA73BULL));
    return h;
  }

  std::mt19937_64 make_rng() const { return std::mt19937_64(derive_seed()); }
};

/// Uniform draw in (0, 1], from the top 53 bits of the generator output.
/// Hand-rolled (rather than std::uniform_real_distribution) so that the
/// sequence is pinned across standard library implementations.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// One standard normal pair via Box-Muller.
inline std::pair<double, double> standard_normal_pair(std::mt19937_64& rng) {
  const double u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

/// CN(0, variance): real and imaginary parts i.i.d. N(0, variance/2).
inline std::complex<double> complex_gaussian(std::mt19937_64& rng, double variance) {
  if (variance <= 0.0) return {0.0, 0.0};
  const auto [re, im] = standard_normal_pair(rng);
  const double s = std::sqrt(variance / 2.0);
  return {s * re, s * im};
}

/// Kahan-Neumaier compensated accumulator; keeps reductions insensitive to
/// summation order at the 1 ulp level.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace misodof

#endif  // MISODOF_STREAM_KEY_HPP
