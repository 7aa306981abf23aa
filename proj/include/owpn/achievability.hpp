#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "owpn/channel.hpp"
#include "owpn/core.hpp"

namespace owpn::achievability {

/// Input-distribution and estimator knobs for one simulated transmission.
/// The transmit amplitude is A with A^2 = amplitude_shift + Exp(amplitude_scale)
/// and the phase is uniform on [0, 2pi); the defaults saturate the
/// per-symbol power budget E A^2 = P/L exactly.
struct SchemeConfig {
  std::size_t n_blocks = 0;
  double amplitude_shift = 0.0;
  /// Mean of the exponential part; negative (the default) means
  /// "whatever is left of the budget", i.e. P/L - amplitude_shift.
  double amplitude_scale = -1.0;
  std::size_t bins_amplitude = 32;
  std::size_t bins_phase = 32;
  std::uint64_t seed = 0;
};

/// The scale actually used after resolving the default; throws
/// validation_error("power_budget_exceeded") if shift + scale > P/L (with a
/// relative 1e-12 slack for round-off).
double resolved_amplitude_scale(const ChannelParams& params, const SchemeConfig& config);

/// Ground-truth channel inputs, one entry per block.
struct SchemeInput {
  std::vector<double> amplitude;
  std::vector<double> phase;  // in [0, 2pi)
};

/// Draws the input sequence (amplitude then phase, block by block) from
/// stream (seed, 0).
SchemeInput sample_scheme_input(const ChannelParams& params, const SchemeConfig& config);

/// Per-block receiver statistics. r is the Euclidean block norm ||Y_k||
/// (all L samples). phi is the genie-aided phase statistic
/// arg( y_first[k] * conj(y_last[k-1] * e^{-j phi_{k-1}}) ), wrapped to
/// [0, 2pi) — the previous block's transmit phase is handed to the
/// receiver, so phi tracks the current phase up to one step of Wiener
/// drift plus additive noise. The first block has no reference and
/// carries amplitude information only.
struct ReceiverStatistics {
  double r = 0.0;
  std::optional<double> phi;
};

std::vector<ReceiverStatistics> receiver_statistics(
    std::span<const channel::BlockObservation> blocks, std::span<const double> input_phases);

/// Right-open bin edges at the empirical quantiles; returns n_bins + 1 edges
/// with the extremes pushed to +-inf so every value lands somewhere. Ties
/// can merge interior edges; assign_bins copes (empty bins contribute
/// nothing to the histogram).
std::vector<double> quantile_bin_edges(std::vector<double> values, std::size_t n_bins);

std::vector<std::size_t> assign_bins(std::span<const double> values,
                                     std::span<const double> edges);

/// Plug-in (maximum-likelihood) mutual information of the joint histogram
/// of two label sequences, in nats. Plug-in estimates are biased upward by
/// roughly (nu-1)(nw-1)/(2n); callers keep n >> bins^2 so the bias stays
/// well under the tolerances used in comparisons.
double mutual_information_nats(std::span<const std::size_t> u, std::span<const std::size_t> w,
                               std::size_t nu, std::size_t nw);

struct RateEstimate {
  double amplitude_nats = 0.0;
  double phase_nats = 0.0;
  double total_nats = 0.0;
  std::size_t n_amplitude_pairs = 0;
  std::size_t n_phase_pairs = 0;
};

/// I(A; r) + I(Phi; phi) through quantile binning. Throws
/// validation_error("insufficient_samples") below 10^4 blocks — the plug-in
/// bias is not under control there.
RateEstimate plugin_rate_estimate(const SchemeInput& input,
                                  std::span<const ReceiverStatistics> stats,
                                  std::size_t bins_amplitude, std::size_t bins_phase);

struct ExperimentResult {
  ChannelParams params;
  std::size_t n_blocks = 0;
  std::uint64_t seed = 0;
  RateEstimate rate;
  double outer_bound_nats = 0.0;
};

/// End-to-end simulated rate for one parameter point. Streams the channel
/// sample by sample (nothing proportional to n_blocks * L is materialized)
/// using streams (seed,0)=input, (seed,1)=phase walk, (seed,2)=noise, in the
/// same draw order as sample_phase + transmit, so results are bit-identical
/// to the materialized pipeline.
ExperimentResult run_experiment(const ChannelParams& params, const SchemeConfig& config);

}  // namespace owpn::achievability
