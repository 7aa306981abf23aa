#pragma once

#include <complex>
#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "owpn/core.hpp"
#include "owpn/rng.hpp"

namespace owpn::channel {

using cplx = std::complex<double>;

/// One realization of the Wiener phase process at sample resolution,
/// stored unwrapped on the real line. theta[0] is the uniform initial
/// phase; consecutive entries differ by i.i.d. N(0, sigma2/L) increments.
/// Wrapping happens only where a statistic needs it, since wrapping early
/// destroys the increment statistics.
struct PhaseTrajectory {
  std::vector<double> theta;
  double sigma2_per_sample = 0.0;
};

/// One symbol's worth of receiver samples together with the symbol that
/// produced them: y[l] = x * exp(j theta[mL+l]) + w[mL+l], l = 0..L-1.
struct BlockObservation {
  cplx x;
  std::vector<cplx> y;
  std::size_t block_index = 0;
};

/// Incremental phase-walk sampler; sample_phase is this, materialized.
class PhaseWalk {
 public:
  PhaseWalk(const ChannelParams& params, RngSeed seed);
  double next();

 private:
  RngStream rng_;
  double increment_std_;
  double current_;
  bool started_ = false;
};

/// Additive receiver noise, circularly symmetric complex Gaussian with
/// E|w|^2 = 2 (unit variance per real component).
class NoiseSampler {
 public:
  explicit NoiseSampler(RngSeed seed) : rng_(seed) {}
  cplx next() { return {rng_.normal(), rng_.normal()}; }

 private:
  RngStream rng_;
};

/// Samples a phase trajectory of n_blocks * L points: uniform start on
/// [0, 2pi), then a Gaussian random walk with increment variance sigma2/L.
PhaseTrajectory sample_phase(const ChannelParams& params, std::size_t n_blocks, RngSeed seed);

/// Internal test API: lets oracle tests switch the additive noise off.
struct TransmitHooks {
  double noise_scale = 1.0;
};

/// Runs the symbols x through the channel against the given trajectory.
/// Throws validation_error("phase_too_short") if the trajectory cannot
/// cover |x| blocks.
std::vector<BlockObservation> transmit(const ChannelParams& params, std::span<const cplx> x,
                                       const PhaseTrajectory& phase, RngSeed seed,
                                       TransmitHooks hooks = {});

/// Amplitude sufficient statistic |L^{-1/2} sum_l y_l| of one block; its
/// square is noncentral chi-square (2 dof, noncentrality L|x|^2) when the
/// phase is frozen.
double matched_block_statistic(const BlockObservation& block);

/// Trajectory dump, one row per sample: k,theta,re_y,im_y.
void write_trajectory_csv(std::ostream& out, const PhaseTrajectory& phase,
                          std::span<const cplx> samples);

}  // namespace owpn::channel
