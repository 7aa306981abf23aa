#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "owpn/core.hpp"

namespace owpn::experiments {

/// One sample-moment-vs-theory comparison.
struct MomentCheck {
  std::string metric;
  std::size_t n = 0;     // samples behind the estimate
  double sample = 0.0;   // estimate
  double expected = 0.0; // theory value
  double se = 0.0;       // standard error of the estimate
  double z = 0.0;        // (sample - expected)/se, 0 when se = sample dev = 0
};

/// Channel moment checks behind `simulate stats`:
///   noise_power        mean |y|^2 of an all-zero transmission (expected 2)
///   increment_variance sample variance of phase increments (expected
///                      sigma2/L, theory SE since the increment law is known)
///   block_norm_sq      mean ||Y_k||^2 with the constant-modulus input
///                      |x| = sqrt(P/L) (expected P + 2L)
/// Streams: (seed,1) phase walk, (seed,2) signal-run noise, (seed,3)
/// noise-only run.
std::vector<MomentCheck> run_moment_checks(const ChannelParams& params, std::size_t n_blocks,
                                           std::uint64_t seed);

}  // namespace owpn::experiments
