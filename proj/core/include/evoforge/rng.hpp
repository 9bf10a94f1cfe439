#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace evoforge {

/// Seeded random stream. Bounded draws are implemented here rather than via
/// std::*_distribution so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent seed for a named sub-stream, e.g. derive(seed, "activation", 7).
  static std::uint64_t derive(std::uint64_t seed, std::string_view stream,
                              std::uint64_t index = 0);

  std::uint64_t next();
  /// Uniform in [0, n); n must be > 0.
  std::size_t uniform_index(std::size_t n);
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01();
  bool bernoulli(double p);
  double normal();

  std::uint64_t seed() const noexcept { return seed_; }
  /// Digest of the current engine state (opaque, hex).
  std::string state_digest() const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace evoforge
