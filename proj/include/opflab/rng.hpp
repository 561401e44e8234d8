#pragma once

// Deterministic random streams (xoshiro256** seeded via splitmix64).
// All stochastic behaviour in the project flows through Rng so that a
// fixed seed reproduces runs bit-for-bit, including across env clones:
// Rng is a plain value type and copies carry the full stream state.

#include <cstdint>

namespace opflab {

class Rng {
 public:
  Rng() : Rng(0x9e3779b97f4a7c15ULL) {}
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal (Box-Muller, cached pair).
  double normal();
  double normal(double mean, double stddev);

  double weibull(double shape_k, double scale_c);
  double lognormal(double mu, double sigma);

  // Derive an independent substream; deterministic in (state, stream_id).
  Rng split(std::uint64_t stream_id) const;

 private:
  std::uint64_t s_[4];
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace opflab
