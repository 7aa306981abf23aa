#include "owpn/achievability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "owpn/bounds.hpp"
#include "owpn/rng.hpp"

namespace owpn::achievability {

namespace {

double wrap_to_2pi(double angle) {
  // std::arg returns (-pi, pi]; the statistic is reported on [0, 2pi).
  return angle < 0.0 ? angle + kTwoPi : angle;
}

void check_config(const ChannelParams& params, const SchemeConfig& config) {
  validate(params);
  integer_oversampling(params);  // simulation needs integral L
  if (config.n_blocks == 0) {
    throw validation_error("invalid_block_count", "n_blocks must be positive");
  }
  if (config.amplitude_shift < 0.0 || !std::isfinite(config.amplitude_shift)) {
    throw validation_error("invalid_amplitude_law",
                           "amplitude shift must be finite and >= 0");
  }
  if (config.bins_amplitude < 8 || config.bins_phase < 8) {
    throw validation_error("invalid_bins", "quantization needs >= 8 bins");
  }
}

}  // namespace

double resolved_amplitude_scale(const ChannelParams& params, const SchemeConfig& config) {
  check_config(params, config);
  const double budget = params.per_sample_power();
  const double scale = config.amplitude_scale < 0.0
                           ? budget - config.amplitude_shift
                           : config.amplitude_scale;
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw validation_error("invalid_amplitude_law",
                           "amplitude scale must be positive (is the shift "
                           "already eating the whole budget?)");
  }
  // E A^2 = shift + scale must fit the per-symbol budget P/L; allow a hair
  // of round-off because the default saturates it exactly.
  if (config.amplitude_shift + scale > budget * (1.0 + 1e-12)) {
    throw validation_error("power_budget_exceeded",
                           "shift + scale exceeds the per-sample power P/L");
  }
  return scale;
}

SchemeInput sample_scheme_input(const ChannelParams& params, const SchemeConfig& config) {
  const double scale = resolved_amplitude_scale(params, config);
  RngStream rng(config.seed, 0);
  SchemeInput input;
  input.amplitude.reserve(config.n_blocks);
  input.phase.reserve(config.n_blocks);
  for (std::size_t m = 0; m < config.n_blocks; ++m) {
    input.amplitude.push_back(
        std::sqrt(config.amplitude_shift + rng.exponential(scale)));
    input.phase.push_back(rng.uniform(0.0, kTwoPi));
  }
  return input;
}

std::vector<ReceiverStatistics> receiver_statistics(
    std::span<const channel::BlockObservation> blocks,
    std::span<const double> input_phases) {
  if (blocks.size() != input_phases.size()) {
    throw validation_error("size_mismatch",
                           "one input phase per observed block required");
  }
  std::vector<ReceiverStatistics> stats;
  stats.reserve(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (blocks[k].y.empty()) {
      throw validation_error("empty_block", "blocks must carry samples");
    }
    ReceiverStatistics s;
    double norm2 = 0.0;
    for (const auto& y : blocks[k].y) norm2 += std::norm(y);
    s.r = std::sqrt(norm2);
    if (k > 0) {
      // Genie reference: previous block's last sample with its transmit
      // phase removed leaves (amplitude) * e^{j theta} + noise; beating the
      // current block's first sample against it isolates the current
      // transmit phase up to one increment of drift.
      const channel::cplx ref =
          blocks[k - 1].y.back() * std::polar(1.0, -input_phases[k - 1]);
      s.phi = wrap_to_2pi(std::arg(blocks[k].y.front() * std::conj(ref)));
    }
    stats.push_back(s);
  }
  return stats;
}

std::vector<double> quantile_bin_edges(std::vector<double> values, std::size_t n_bins) {
  if (n_bins < 2) {
    throw validation_error("invalid_bins", "need at least two bins");
  }
  if (values.size() < n_bins) {
    throw validation_error("invalid_bins", "fewer samples than bins");
  }
  std::sort(values.begin(), values.end());
  std::vector<double> edges(n_bins + 1);
  edges.front() = -std::numeric_limits<double>::infinity();
  edges.back() = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n_bins; ++i) {
    edges[i] = values[values.size() * i / n_bins];
  }
  return edges;
}

std::vector<std::size_t> assign_bins(std::span<const double> values,
                                     std::span<const double> edges) {
  if (edges.size() < 3) {
    throw validation_error("invalid_bins", "edge vector too short");
  }
  const std::size_t n_bins = edges.size() - 1;
  std::vector<std::size_t> labels;
  labels.reserve(values.size());
  for (double v : values) {
    // Right-open bins: a value equal to an interior edge starts a new bin.
    const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, v);
    const std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
    labels.push_back(std::min(bin, n_bins - 1));
  }
  return labels;
}

double mutual_information_nats(std::span<const std::size_t> u,
                               std::span<const std::size_t> w,
                               std::size_t nu, std::size_t nw) {
  if (u.size() != w.size() || u.empty()) {
    throw validation_error("size_mismatch",
                           "need equal, nonempty label sequences");
  }
  if (nu == 0 || nw == 0) {
    throw validation_error("invalid_bins", "alphabet sizes must be positive");
  }
  std::vector<double> joint(nu * nw, 0.0);
  std::vector<double> pu(nu, 0.0), pw(nw, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] >= nu || w[i] >= nw) {
      throw validation_error("invalid_bins", "label out of range");
    }
    joint[u[i] * nw + w[i]] += 1.0;
  }
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 0; j < nw; ++j) {
      joint[i * nw + j] /= n;
      pu[i] += joint[i * nw + j];
      pw[j] += joint[i * nw + j];
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 0; j < nw; ++j) {
      const double p = joint[i * nw + j];
      if (p > 0.0) mi += p * std::log(p / (pu[i] * pw[j]));
    }
  }
  // Finite-sample jitter can push the sum a hair below zero.
  return std::max(mi, 0.0);
}

RateEstimate plugin_rate_estimate(const SchemeInput& input,
                                  std::span<const ReceiverStatistics> stats,
                                  std::size_t bins_amplitude, std::size_t bins_phase) {
  const std::size_t n = stats.size();
  if (input.amplitude.size() != n || input.phase.size() != n) {
    throw validation_error("size_mismatch",
                           "inputs and statistics must align block-for-block");
  }
  if (n < 10'000) {
    throw validation_error("insufficient_samples",
                           "plug-in MI needs at least 10^4 symbol pairs");
  }
  if (bins_amplitude < 8 || bins_phase < 8) {
    throw validation_error("invalid_bins", "quantization needs >= 8 bins");
  }

  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) r[k] = stats[k].r;

  std::vector<double> phi_in, phi_out;
  phi_in.reserve(n);
  phi_out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (stats[k].phi) {
      phi_in.push_back(input.phase[k]);
      phi_out.push_back(*stats[k].phi);
    }
  }

  RateEstimate est;
  est.n_amplitude_pairs = n;
  est.n_phase_pairs = phi_in.size();

  const auto a_labels =
      assign_bins(input.amplitude, quantile_bin_edges(input.amplitude, bins_amplitude));
  const auto r_labels = assign_bins(r, quantile_bin_edges(r, bins_amplitude));
  est.amplitude_nats =
      mutual_information_nats(a_labels, r_labels, bins_amplitude, bins_amplitude);

  if (!phi_in.empty()) {
    const auto p_labels =
        assign_bins(phi_in, quantile_bin_edges(phi_in, bins_phase));
    const auto q_labels =
        assign_bins(phi_out, quantile_bin_edges(phi_out, bins_phase));
    est.phase_nats =
        mutual_information_nats(p_labels, q_labels, bins_phase, bins_phase);
  }
  est.total_nats = est.amplitude_nats + est.phase_nats;
  return est;
}

ExperimentResult run_experiment(const ChannelParams& params, const SchemeConfig& config) {
  const long L = integer_oversampling(params);
  SchemeInput input = sample_scheme_input(params, config);

  channel::PhaseWalk walk(params, RngSeed{config.seed, 1});
  channel::NoiseSampler noise(RngSeed{config.seed, 2});

  // Stream one sample at a time; only the per-block statistics are kept.
  std::vector<ReceiverStatistics> stats;
  stats.reserve(config.n_blocks);
  channel::cplx prev_ref{};  // last sample of the previous block, genie-rotated
  for (std::size_t m = 0; m < config.n_blocks; ++m) {
    const channel::cplx x = std::polar(input.amplitude[m], input.phase[m]);
    double norm2 = 0.0;
    channel::cplx first{}, last{};
    for (long l = 0; l < L; ++l) {
      const channel::cplx y = x * std::polar(1.0, walk.next()) + noise.next();
      norm2 += std::norm(y);  // accumulation order matches receiver_statistics
      if (l == 0) first = y;
      last = y;
    }
    ReceiverStatistics s;
    s.r = std::sqrt(norm2);
    if (m > 0) s.phi = wrap_to_2pi(std::arg(first * std::conj(prev_ref)));
    prev_ref = last * std::polar(1.0, -input.phase[m]);
    stats.push_back(s);
  }

  ExperimentResult result;
  result.params = params;
  result.n_blocks = config.n_blocks;
  result.seed = config.seed;
  result.rate = plugin_rate_estimate(input, stats, config.bins_amplitude,
                                     config.bins_phase);
  result.outer_bound_nats = bounds::owpn_new_outer_bound_nats(
      params.power, params.sigma2, params.oversampling);
  return result;
}

}  // namespace owpn::achievability
