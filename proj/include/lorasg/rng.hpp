#pragma once

// Small self-contained random machinery for the Monte Carlo engine. Each
// replication owns a Stream keyed by (seed, sequence), so results do not
// depend on how replications are scheduled across worker threads.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace lorasg::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 state expansion.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t sequence) {
    std::uint64_t z = seed ^ 0xA3C59AC2ED9B8B6FULL;
    z += 0x9E3779B97F4A7C15ULL * (sequence + 1);
    for (auto& w : s_) w = splitmix64(z);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Strictly inside (0,1) so log() stays finite.
  double uniform01() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // mean-1 exponential
  double exponential() { return -std::log(uniform01()); }

  // standard normal, Box-Muller with pair caching
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    const double th = 2.0 * M_PI * uniform01();
    cached_ = r * std::sin(th);
    has_cached_ = true;
    return r * std::cos(th);
  }

  // Exact Poisson sampling by inversion. Means above 16 are split into
  // chunks so exp(-m) stays far from underflow; cost is O(mean), same order
  // as consuming the points the Monte Carlo loop generates anyway.
  long poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
      throw std::invalid_argument("poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    const long chunks = mean > 16.0 ? long(mean / 16.0) + 1 : 1;
    const double m = mean / double(chunks);
    long total = 0;
    for (long i = 0; i < chunks; ++i) total += poisson_small(m);
    return total;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  long poisson_small(double m) {
    const double u = uniform01();
    double p = std::exp(-m);
    double cum = p;
    long k = 0;
    // P(K > 16 + 180) is below 1e-200 for m <= 16; the cap only guards the
    // impossible tail.
    const long cap = 200;
    while (u > cum && k < cap) {
      ++k;
      p *= m / double(k);
      cum += p;
    }
    return k;
  }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Inverse standard normal CDF: Acklam's rational approximation polished with
// one Halley step against erfc, good to ~1e-14 over (0,1).
inline double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("normal_quantile needs q in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (q < plow) {
    const double r = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else if (q <= 1.0 - plow) {
    const double r = q - 0.5;
    const double t = r * r;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * r /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    const double r = std::sqrt(-2.0 * std::log(1.0 - q));
    x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  }
  // Halley refinement
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - q;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

}  // namespace lorasg::rng
