#pragma once

#include <cstdint>
#include <random>

namespace ltpinn {

/// Named sub-streams derived from one root seed.
enum class Stream : std::uint64_t {
  NetworkInit = 1,
  GammaInit = 2,
  Collocation = 3,
  Measurements = 4,
  Subsample = 5,
};

/// Platform-independent generator used for every stochastic step.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Distributions are implemented here rather than taken from
/// <random> because the standard library distributions are
/// implementation-defined:
///   uniform()  = (next() >> 11) * 2^-53, in [0, 1)
///   normal()   = Box-Muller, sqrt(-2 ln(1 - u1)) * cos(2 pi u2), no caching
///   below(n)   = rejection sampling on next() (unbiased)
/// Sub-stream seeds are splitmix64(root ^ splitmix64(stream id)).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t root, Stream id) { return Rng(derive_seed(root, id)); }
  static std::uint64_t derive_seed(std::uint64_t root, Stream id);
  static std::uint64_t splitmix64(std::uint64_t x);

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ltpinn
