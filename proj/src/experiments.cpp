#include "owpn/experiments.hpp"

#include <cmath>

#include "owpn/channel.hpp"
#include "owpn/rng.hpp"

namespace owpn::experiments {

namespace {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  std::size_t n = 0;
};

// Welford, so huge runs do not lose digits to naive sum-of-squares.
MeanVar accumulate(const std::vector<double>& xs) {
  MeanVar mv;
  double m2 = 0.0;
  for (double x : xs) {
    ++mv.n;
    const double d = x - mv.mean;
    mv.mean += d / static_cast<double>(mv.n);
    m2 += d * (x - mv.mean);
  }
  if (mv.n > 1) mv.var = m2 / static_cast<double>(mv.n - 1);
  return mv;
}

MomentCheck mean_check(std::string metric, const std::vector<double>& xs, double expected) {
  const MeanVar mv = accumulate(xs);
  MomentCheck check;
  check.metric = std::move(metric);
  check.n = mv.n;
  check.sample = mv.mean;
  check.expected = expected;
  check.se = std::sqrt(mv.var / static_cast<double>(mv.n));
  check.z = check.se > 0.0 ? (check.sample - check.expected) / check.se
                           : (check.sample == check.expected ? 0.0 : INFINITY);
  return check;
}

}  // namespace

std::vector<MomentCheck> run_moment_checks(const ChannelParams& params, std::size_t n_blocks,
                                           std::uint64_t seed) {
  const long L = integer_oversampling(params);
  if (n_blocks < 2) {
    throw validation_error("invalid_block_count", "moment checks need n_blocks >= 2");
  }
  const auto n_samples = n_blocks * static_cast<std::size_t>(L);

  const auto traj = channel::sample_phase(params, n_blocks, RngSeed{seed, 1});

  // Constant-modulus input: every block carries |x|^2 = P/L, so
  // E||Y_k||^2 = L |x|^2 + 2L = P + 2L without conditioning on a random A.
  const channel::cplx x_const{std::sqrt(params.per_sample_power()), 0.0};
  const std::vector<channel::cplx> xs(n_blocks, x_const);
  const auto signal_blocks = channel::transmit(params, xs, traj, RngSeed{seed, 2});

  const std::vector<channel::cplx> zeros(n_blocks, channel::cplx{});
  const auto noise_blocks = channel::transmit(params, zeros, traj, RngSeed{seed, 3});

  std::vector<MomentCheck> checks;

  {
    std::vector<double> pw;
    pw.reserve(n_samples);
    for (const auto& block : noise_blocks)
      for (const auto& y : block.y) pw.push_back(std::norm(y));
    checks.push_back(mean_check("noise_power", pw, 2.0));
  }

  {
    std::vector<double> incs;
    incs.reserve(n_samples - 1);
    for (std::size_t k = 0; k + 1 < traj.theta.size(); ++k) {
      incs.push_back(traj.theta[k + 1] - traj.theta[k]);
    }
    const MeanVar mv = accumulate(incs);
    MomentCheck check;
    check.metric = "increment_variance";
    check.n = mv.n;
    check.sample = mv.var;
    check.expected = traj.sigma2_per_sample;
    // Variance of the sample variance of n Gaussians is 2 sigma^4/(n-1);
    // the theory value keeps the z-score well defined under the null.
    check.se = check.expected * std::sqrt(2.0 / static_cast<double>(mv.n - 1));
    check.z = check.se > 0.0 ? (check.sample - check.expected) / check.se
                             : (check.sample == check.expected ? 0.0 : INFINITY);
    checks.push_back(check);
  }

  {
    std::vector<double> norms;
    norms.reserve(n_blocks);
    for (const auto& block : signal_blocks) {
      double norm2 = 0.0;
      for (const auto& y : block.y) norm2 += std::norm(y);
      norms.push_back(norm2);
    }
    checks.push_back(mean_check("block_norm_sq", norms,
                                params.power + 2.0 * static_cast<double>(L)));
  }

  return checks;
}

}  // namespace owpn::experiments
