#include "owpn/channel.hpp"

#include <cmath>

#include "owpn/csv.hpp"

namespace owpn::channel {

PhaseWalk::PhaseWalk(const ChannelParams& params, RngSeed seed)
    : rng_(seed),
      increment_std_(std::sqrt(params.sigma2 / params.oversampling)),
      current_(0.0) {
  validate(params);
  integer_oversampling(params);
}

double PhaseWalk::next() {
  if (!started_) {
    started_ = true;
    current_ = rng_.uniform(0.0, kTwoPi);
  } else {
    current_ += increment_std_ * rng_.normal();
  }
  return current_;
}

PhaseTrajectory sample_phase(const ChannelParams& params, std::size_t n_blocks, RngSeed seed) {
  if (n_blocks < 1) throw validation_error("bad_block_count", "n_blocks must be >= 1");
  const long l = integer_oversampling(params);
  PhaseWalk walk(params, seed);
  PhaseTrajectory traj;
  traj.sigma2_per_sample = params.sigma2 / static_cast<double>(l);
  traj.theta.resize(n_blocks * static_cast<std::size_t>(l));
  for (auto& theta : traj.theta) theta = walk.next();
  return traj;
}

std::vector<BlockObservation> transmit(const ChannelParams& params, std::span<const cplx> x,
                                       const PhaseTrajectory& phase, RngSeed seed,
                                       TransmitHooks hooks) {
  const auto l = static_cast<std::size_t>(integer_oversampling(params));
  if (phase.theta.size() < x.size() * l) {
    throw validation_error("phase_too_short",
                           "phase trajectory shorter than the transmitted blocks");
  }
  NoiseSampler noise(seed);
  std::vector<BlockObservation> blocks(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) {
    auto& block = blocks[m];
    block.x = x[m];
    block.block_index = m;
    block.y.resize(l);
    for (std::size_t i = 0; i < l; ++i) {
      const double theta = phase.theta[m * l + i];
      block.y[i] = x[m] * std::polar(1.0, theta) + hooks.noise_scale * noise.next();
    }
  }
  return blocks;
}

double matched_block_statistic(const BlockObservation& block) {
  cplx sum = 0.0;
  for (const auto& y : block.y) sum += y;
  return std::abs(sum) / std::sqrt(static_cast<double>(block.y.size()));
}

void write_trajectory_csv(std::ostream& out, const PhaseTrajectory& phase,
                          std::span<const cplx> samples) {
  out << "k,theta,re_y,im_y\n";
  for (std::size_t k = 0; k < phase.theta.size(); ++k) {
    out << k << ',' << csv::fmt17(phase.theta[k]);
    if (k < samples.size()) {
      out << ',' << csv::fmt17(samples[k].real()) << ',' << csv::fmt17(samples[k].imag());
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

}  // namespace owpn::channel
