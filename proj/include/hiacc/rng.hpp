#pragma once

#include <cstdint>
#include <random>

namespace hiacc {

/// Deterministic random stream.
///
/// Streams form a tree: `derive(k)` returns the k-th child of a stream and
/// depends only on the parent's seed, never on how many draws the parent has
/// made. Experiments use seed -> chain -> purpose so that reruns are
/// bit-identical regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  Rng derive(std::uint64_t stream) const;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();
  double exponential();
  double gamma(double shape);
  /// Poisson(mean) by sequential inversion of the CDF; exact for the small
  /// means used by the rejection sampler.
  std::uint64_t poisson(double mean);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// splitmix64 finalizer, used for stream derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace hiacc
