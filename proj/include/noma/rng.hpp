#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace noma {

// Purpose tag that separates the random streams consumed by one trial.
enum class StreamPurpose : std::uint64_t {
  Payload = 1,
  Channel = 2,
  Noise = 3,
  Interleaver = 4,
  Generic = 5,
};

// Splittable counter-seeded generator. Two streams with distinct
// (seed, trial, purpose) keys are statistically independent; the same key
// reproduces the identical sequence, so parallel trials stay deterministic
// regardless of scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t trial, StreamPurpose purpose);

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double next_double();

  // Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
  std::uint64_t next_below(std::uint64_t bound);

  // Standard normal, Box-Muller (pairs cached).
  double next_normal();

  // Circularly-symmetric complex Gaussian with the given total variance.
  std::complex<double> next_cgauss(double variance);

  // One uniformly random bit.
  int next_bit() { return static_cast<int>(next_u64() >> 63); }

 private:
  std::array<std::uint64_t, 4> state_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Stateless 64-bit mix (splitmix64 finalizer); used to derive interleaver
// seeds and stream keys.
std::uint64_t mix64(std::uint64_t x);

}  // namespace noma
