#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "owpn/achievability.hpp"
#include "owpn/bounds.hpp"
#include "owpn/channel.hpp"
#include "support/oracles.hpp"

using namespace owpn;
using namespace owpn::achievability;
using channel::cplx;

namespace {

SchemeConfig basic_config(std::size_t n_blocks, std::uint64_t seed) {
  SchemeConfig cfg;
  cfg.n_blocks = n_blocks;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("amplitude scale resolution against the power budget") {
  const ChannelParams p{10.0, 1.0, 4.0};  // per-sample budget 2.5

  auto cfg = basic_config(100, 1);
  CHECK(resolved_amplitude_scale(p, cfg) == doctest::Approx(2.5).epsilon(1e-15));

  cfg.amplitude_shift = 1.0;
  CHECK(resolved_amplitude_scale(p, cfg) == doctest::Approx(1.5).epsilon(1e-15));

  cfg.amplitude_scale = 1.5;  // exactly saturating is fine
  CHECK(resolved_amplitude_scale(p, cfg) == doctest::Approx(1.5).epsilon(1e-15));

  cfg.amplitude_scale = 2.0;  // 1.0 + 2.0 > 2.5
  CHECK_THROWS_WITH_AS(static_cast<void>(resolved_amplitude_scale(p, cfg)),
                       doctest::Contains("exceeds the per-sample power"),
                       validation_error);

  cfg.amplitude_scale = -1.0;
  cfg.amplitude_shift = 2.5;  // nothing left for the exponential part
  CHECK_THROWS_AS(static_cast<void>(resolved_amplitude_scale(p, cfg)), validation_error);
}

TEST_CASE("scheme config validation") {
  const ChannelParams p{10.0, 1.0, 4.0};
  auto cfg = basic_config(0, 1);
  CHECK_THROWS_AS(static_cast<void>(resolved_amplitude_scale(p, cfg)), validation_error);
  cfg = basic_config(100, 1);
  cfg.bins_amplitude = 4;
  CHECK_THROWS_AS(static_cast<void>(resolved_amplitude_scale(p, cfg)), validation_error);
  cfg = basic_config(100, 1);
  cfg.bins_phase = 7;
  CHECK_THROWS_AS(static_cast<void>(resolved_amplitude_scale(p, cfg)), validation_error);
}

TEST_CASE("scheme input saturates the budget and is uniform in phase") {
  const ChannelParams p{8.0, 1.0, 2.0};  // budget 4
  const std::size_t n = 200000;
  const auto input = sample_scheme_input(p, basic_config(n, 5));
  REQUIRE(input.amplitude.size() == n);
  REQUIRE(input.phase.size() == n);

  std::vector<double> a2(n);
  for (std::size_t i = 0; i < n; ++i) a2[i] = input.amplitude[i] * input.amplitude[i];
  // A^2 ~ Exp(4): mean 4, sd 4
  CHECK(std::abs(oracles::sample_mean(a2) - 4.0) < 4.0 * 4.0 / std::sqrt(double(n)));

  std::vector<std::size_t> counts(32, 0);
  for (double phi : input.phase) {
    REQUIRE(phi >= 0.0);
    REQUIRE(phi < kTwoPi);
    ++counts[static_cast<std::size_t>(phi / kTwoPi * 32)];
  }
  CHECK(oracles::chi2_gof_pvalue_uniform(counts) > 1e-4);

  // amplitude and phase draws must not leak into each other
  double cov = 0.0;
  const double ma = oracles::sample_mean(a2);
  for (std::size_t i = 0; i < n; ++i) cov += (a2[i] - ma) * (input.phase[i] - kPi);
  cov /= double(n);
  const double sd = std::sqrt(oracles::sample_variance(a2) *
                              oracles::sample_variance(input.phase) / double(n));
  CHECK(std::abs(cov) < 4.0 * sd);
}

TEST_CASE("shifted amplitude law keeps its floor and its mean") {
  const ChannelParams p{8.0, 1.0, 2.0};
  auto cfg = basic_config(100000, 9);
  cfg.amplitude_shift = 2.0;  // A^2 = 2 + Exp(2)
  const auto input = sample_scheme_input(p, cfg);
  double min_a2 = 1e300, mean_a2 = 0.0;
  for (double a : input.amplitude) {
    min_a2 = std::min(min_a2, a * a);
    mean_a2 += a * a;
  }
  mean_a2 /= double(input.amplitude.size());
  CHECK(min_a2 >= 2.0);
  CHECK(std::abs(mean_a2 - 4.0) < 4.0 * 2.0 / std::sqrt(double(input.amplitude.size())));
}

TEST_CASE("scheme input is reproducible") {
  const ChannelParams p{8.0, 1.0, 2.0};
  const auto one = sample_scheme_input(p, basic_config(500, 77));
  const auto two = sample_scheme_input(p, basic_config(500, 77));
  CHECK(one.amplitude == two.amplitude);
  CHECK(one.phase == two.phase);
  const auto other = sample_scheme_input(p, basic_config(500, 78));
  CHECK(one.amplitude != other.amplitude);
}

TEST_CASE("receiver statistics: block norm and genie phase") {
  std::vector<channel::BlockObservation> blocks(2);
  blocks[0].y = {cplx{3.0, 4.0}};
  blocks[1].y = {cplx{0.0, 2.0}};
  const std::vector<double> phases{0.0, 0.0};
  const auto stats = receiver_statistics(blocks, phases);
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].r == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_FALSE(stats[0].phi.has_value());
  REQUIRE(stats[1].phi.has_value());
  // arg((2j) * conj(3+4j)) = arg(8 + 6j)
  CHECK(*stats[1].phi == doctest::Approx(std::atan2(6.0, 8.0)).epsilon(1e-14));

  std::vector<channel::BlockObservation> multi(1);
  multi[0].y = {cplx{1.0, 0.0}, cplx{0.0, 1.0}, cplx{2.0, 2.0}};
  CHECK(receiver_statistics(multi, std::vector<double>{0.0})[0].r ==
        doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));

  CHECK_THROWS_AS(static_cast<void>(receiver_statistics(blocks, std::vector<double>{0.0})),
                  validation_error);
  std::vector<channel::BlockObservation> empty(1);
  CHECK_THROWS_AS(static_cast<void>(receiver_statistics(empty, std::vector<double>{0.0})),
                  validation_error);
}

TEST_CASE("noiseless genie statistic recovers the transmit phase exactly") {
  const ChannelParams p{8.0, 0.0, 3.0};  // frozen phase, no drift
  const std::size_t n = 64;
  const auto cfg = basic_config(n, 13);
  const auto input = sample_scheme_input(p, cfg);
  const auto traj = channel::sample_phase(p, n, {13, 1});
  std::vector<cplx> xs(n);
  for (std::size_t m = 0; m < n; ++m) xs[m] = std::polar(input.amplitude[m], input.phase[m]);
  channel::TransmitHooks hooks;
  hooks.noise_scale = 0.0;
  const auto blocks = channel::transmit(p, xs, traj, {13, 2}, hooks);
  const auto stats = receiver_statistics(blocks, input.phase);
  for (std::size_t m = 1; m < n; ++m) {
    REQUIRE(stats[m].phi.has_value());
    // wrap-aware distance to the true phase
    double d = std::abs(*stats[m].phi - input.phase[m]);
    d = std::min(d, kTwoPi - d);
    CHECK(d < 1e-10);
  }
}

TEST_CASE("quantile bin edges and right-open assignment") {
  std::vector<double> values(100);
  std::iota(values.begin(), values.end(), 0.0);  // 0..99
  // shuffle-free disorder: reverse suffices to prove sorting happens inside
  std::reverse(values.begin(), values.end());
  const auto edges = quantile_bin_edges(values, 4);
  REQUIRE(edges.size() == 5);
  CHECK(std::isinf(edges.front()));
  CHECK(edges.front() < 0.0);
  CHECK(edges[1] == 25.0);
  CHECK(edges[2] == 50.0);
  CHECK(edges[3] == 75.0);
  CHECK(std::isinf(edges.back()));

  const std::vector<double> probes{-5.0, 24.9, 25.0, 74.9, 75.0, 1e9};
  const auto labels = assign_bins(probes, edges);
  CHECK(labels == std::vector<std::size_t>{0, 0, 1, 2, 3, 3});

  CHECK_THROWS_AS(static_cast<void>(quantile_bin_edges(values, 1)), validation_error);
  CHECK_THROWS_AS(static_cast<void>(quantile_bin_edges({1.0, 2.0}, 4)), validation_error);
}

TEST_CASE("plug-in mutual information on designed joints") {
  // identity coupling over 16 symbols: ln 16, and the oracle agrees
  const std::size_t n = 1600;
  std::vector<std::size_t> u(n), w(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = w[i] = i % 16;
  const double mi = mutual_information_nats(u, w, 16, 16);
  CHECK(mi == doctest::Approx(std::log(16.0)).epsilon(1e-13));

  std::vector<std::vector<std::size_t>> joint(16, std::vector<std::size_t>(16, 0));
  for (std::size_t i = 0; i < n; ++i) ++joint[u[i]][w[i]];
  CHECK(mi == doctest::Approx(oracles::exact_mi_nats(joint)).epsilon(1e-13));

  // full product design: exactly independent labels, MI = 0
  std::vector<std::size_t> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = i % 8;
    b[i] = (i / 8) % 8;
  }
  CHECK(mutual_information_nats(a, b, 8, 8) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(static_cast<void>(mutual_information_nats(u, w, 8, 16)),
                  validation_error);
  std::vector<std::size_t> shorter(n - 1, 0);
  CHECK_THROWS_AS(static_cast<void>(mutual_information_nats(u, shorter, 16, 16)),
                  validation_error);
}

TEST_CASE("plug-in MI of independent continuous streams stays near zero") {
  RngStream rng(31337, 0);
  const std::size_t n = 100000;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = rng.uniform01();
  }
  const auto xl = assign_bins(x, quantile_bin_edges(x, 32));
  const auto yl = assign_bins(y, quantile_bin_edges(y, 32));
  // plug-in bias is ~(31*31)/(2n) = 0.005 nats; leave statistical headroom
  CHECK(mutual_information_nats(xl, yl, 32, 32) < 0.02);
}

TEST_CASE("rate estimation needs enough samples") {
  const ChannelParams p{10.0, 1.0, 1.0};
  const auto cfg = basic_config(9999, 3);
  const auto input = sample_scheme_input(p, cfg);
  std::vector<ReceiverStatistics> stats(9999);
  CHECK_THROWS_WITH_AS(static_cast<void>(plugin_rate_estimate(input, stats, 32, 32)),
                       doctest::Contains("10^4"), validation_error);
}

TEST_CASE("streamed experiment is bit-identical to the materialized pipeline") {
  const ChannelParams p{10.0, 1.0, 4.0};
  auto cfg = basic_config(10000, 123);
  const auto streamed = run_experiment(p, cfg);

  const auto input = sample_scheme_input(p, cfg);
  const auto traj = channel::sample_phase(p, cfg.n_blocks, {cfg.seed, 1});
  std::vector<cplx> xs(cfg.n_blocks);
  for (std::size_t m = 0; m < cfg.n_blocks; ++m)
    xs[m] = std::polar(input.amplitude[m], input.phase[m]);
  const auto blocks = channel::transmit(p, xs, traj, {cfg.seed, 2});
  const auto stats = receiver_statistics(blocks, input.phase);
  const auto est = plugin_rate_estimate(input, stats, cfg.bins_amplitude, cfg.bins_phase);

  // doubles compared with ==: the two paths must take the same arithmetic
  // route, not merely agree approximately
  CHECK(streamed.rate.amplitude_nats == est.amplitude_nats);
  CHECK(streamed.rate.phase_nats == est.phase_nats);
  CHECK(streamed.rate.total_nats == est.total_nats);
  CHECK(streamed.rate.n_amplitude_pairs == est.n_amplitude_pairs);
  CHECK(streamed.rate.n_phase_pairs == est.n_phase_pairs);
}

TEST_CASE("experiment rates are deterministic and sit under the outer bound") {
  const ChannelParams p{100.0, 1.0, 10.0};
  const auto cfg = basic_config(20000, 9001);
  const auto one = run_experiment(p, cfg);
  const auto two = run_experiment(p, cfg);
  CHECK(one.rate.total_nats == two.rate.total_nats);
  CHECK(one.rate.amplitude_nats == two.rate.amplitude_nats);

  CHECK(one.outer_bound_nats ==
        doctest::Approx(bounds::owpn_new_outer_bound_nats(100.0, 1.0, 10.0)).epsilon(1e-15));
  CHECK(one.rate.total_nats > 0.0);
  CHECK(one.rate.total_nats <= one.outer_bound_nats);
  CHECK(one.rate.n_phase_pairs == cfg.n_blocks - 1);
}

TEST_CASE("cleaner phase tracking earns more phase information") {
  ChannelParams noisy{40.0, 2.0, 4.0};
  ChannelParams clean{40.0, 0.02, 4.0};
  const auto cfg = basic_config(20000, 55);
  const auto r_noisy = run_experiment(noisy, cfg);
  const auto r_clean = run_experiment(clean, cfg);
  CHECK(r_clean.rate.phase_nats > r_noisy.rate.phase_nats);
}
