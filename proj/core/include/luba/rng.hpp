#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "luba/errors.hpp"

namespace luba {

namespace detail {

// SplitMix64 finalizer. Applied to a Weyl sequence it passes the usual
// statistical batteries, which is all we ask of it here.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based generator. Output i of stream s under seed q is a stateless
/// mix of (q, s, i), so any (seed, stream) pair can be reconstructed at any
/// point and substreams (e.g. one per simulated auction) are reproducible
/// under any scheduling.
class CounterRng {
 public:
  CounterRng() : CounterRng(0, 0) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(detail::mix64(seed + 0x9e3779b97f4a7c15ULL) ^
             detail::mix64(~stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL)) {}

  std::uint64_t next_u64() {
    return detail::mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Poisson draw. Exact product method, chunked via additivity so the
  /// running product never underflows. Cost is O(mean) uniforms.
  int poisson(double mean) {
    if (!(mean >= 0.0)) throw DomainError("poisson: mean must be non-negative");
    int n = 0;
    while (mean > 30.0) {
      n += poisson_product(30.0);
      mean -= 30.0;
    }
    return n + poisson_product(mean);
  }

 private:
  int poisson_product(double mean) {
    if (mean <= 0.0) return 0;
    const double threshold = std::exp(-mean);
    double prod = 1.0;
    int k = -1;
    do {
      prod *= next_double();
      ++k;
    } while (prod > threshold);
    return k;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Draws indices 0..K-1 with probability proportional to the given weights.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> weights) {
    cdf_.reserve(weights.size());
    double acc = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw DomainError("DiscreteSampler: negative weight");
      acc += w;
      cdf_.push_back(acc);
    }
    if (cdf_.empty() || acc <= 0.0)
      throw DomainError("DiscreteSampler: weights must have positive total");
  }

  std::size_t draw(CounterRng& rng) const {
    const double u = rng.next_double() * cdf_.back();
    std::size_t lo = 0, hi = cdf_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cdf_[mid] > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

}  // namespace luba
