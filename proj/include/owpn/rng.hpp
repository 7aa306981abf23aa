#pragma once

#include <array>
#include <cstdint>

namespace owpn {

/// Seed plus stream id. Distinct stream ids give statistically independent
/// generators from one seed, so parallel sweep points reproduce identically
/// no matter how work is scheduled.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// xoshiro256++ seeded through splitmix64 from (seed, stream).
///
/// All distributions are built from the 53-bit uniform with exact methods
/// (Marsaglia polar for normals, inverse CDF for exponentials), so a fixed
/// (seed, stream) reproduces every draw bit-for-bit on a given build.
class RngStream {
 public:
  explicit RngStream(RngSeed seed);
  RngStream(std::uint64_t seed, std::uint64_t stream) : RngStream(RngSeed{seed, stream}) {}

  std::uint64_t next_u64();

  /// Uniform on [0, 1), 53 random bits.
  double uniform01();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via the Marsaglia polar method (pairs cached).
  double normal();

  /// Exponential with the given mean, via inverse CDF.
  double exponential(double mean);

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace owpn
