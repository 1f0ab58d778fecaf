#pragma once

#include "maopt/types.hpp"

#include <cstdint>
#include <random>

namespace maopt {

/// Name of the generator pipeline, recorded in experiment metadata so runs
/// can be replayed.
inline constexpr const char* kGeneratorName = "mt19937_64+box-muller";

/// Value-like descriptor of a deterministic random stream. A stream is fully
/// identified by (seed, stream_id): the same pair always reproduces the same
/// draw sequence, and distinct stream ids give statistically independent
/// sequences. Sampling functions take the descriptor and build their engine
/// locally, so streams can be used concurrently without shared state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Derives a child stream. Children with distinct indices are independent
  /// of each other and of the parent; the mapping is deterministic, so any
  /// child can be reconstructed in isolation.
  RandomStream substream(std::uint64_t index) const;

  /// Engine seeded from (seed, stream_id).
  std::mt19937_64 make_engine() const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

/// Draws `count` uniforms on [lo, hi). Consumes the whole stream value; call
/// with distinct substreams for independent batches.
RealVector sample_uniform(const RandomStream& stream, int count, Real lo, Real hi);

namespace detail {

/// Uniform double in [0, 1) from the raw engine, 53 mantissa bits.
inline Real uniform01(std::mt19937_64& engine) {
  return static_cast<Real>(engine() >> 11) * 0x1.0p-53;
}

/// Standard normal pair via Box-Muller; avoids the unspecified state layout
/// of std::normal_distribution so sequences are identical on any platform.
inline std::pair<Real, Real> gaussian_pair(std::mt19937_64& engine) {
  const Real u1 = (static_cast<Real>(engine() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const Real u2 = uniform01(engine);
  const Real radius = std::sqrt(-2.0 * std::log(u1));
  return {radius * std::cos(2.0 * kPi * u2), radius * std::sin(2.0 * kPi * u2)};
}

/// Circularly symmetric complex Gaussian, zero mean, unit variance.
inline Complex complex_gaussian(std::mt19937_64& engine) {
  const auto [re, im] = gaussian_pair(engine);
  return Complex(re, im) * std::sqrt(0.5);
}

}  // namespace detail

}  // namespace maopt
