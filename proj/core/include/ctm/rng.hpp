#pragma once

#include <cstdint>

namespace ctm {

// Counter-based generator: draw k of a stream is a pure function of
// (seed, k), so results do not depend on the platform's <random>.
class RngState {
 public:
  RngState() = default;
  explicit RngState(std::uint64_t seed, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Independent stream derived from this one's seed and a tag; does not
  /// advance this stream.
  RngState fork(std::uint64_t tag) const;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace ctm
