#include "owpn/gdof.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "owpn/bounds.hpp"

namespace owpn::gdof {

double exact(double alpha) {
  if (alpha < 0.0 || !std::isfinite(alpha)) {
    throw validation_error("negative_alpha", "alpha must be finite and >= 0");
  }
  return alpha <= 0.5 ? 0.5 * (1.0 + alpha) : 0.75;
}

double lower_bound(double alpha) { return exact(alpha); }

double amplitude_prelog() { return 0.5; }

double phase_prelog(double alpha) {
  if (alpha < 0.0 || !std::isfinite(alpha)) {
    throw validation_error("negative_alpha", "alpha must be finite and >= 0");
  }
  return std::min(0.5 * alpha, 0.25);
}

BoundEvaluator evaluator(std::string_view bound_name) {
  if (bound_name == "owpn_new_th4") {
    return [](double p, double s2, double l) {
      return bounds::owpn_new_outer_bound_nats(p, s2, l);
    };
  }
  if (bound_name == "owpn_old_th3") {
    return [](double p, double s2, double l) {
      ChannelParams cp;
      cp.power = p;
      cp.sigma2 = s2;
      cp.oversampling = l;
      cp.units = Units::nats;
      return bounds::owpn_old_outer_bound(cp).value;
    };
  }
  if (bound_name == "amplitude") {
    return [](double p, double, double) {
      return bounds::amplitude_rate_bound_nats(p);
    };
  }
  if (bound_name == "phase") {
    return [](double p, double s2, double l) {
      return bounds::phase_rate_bound_raw_nats(p, s2, l);
    };
  }
  throw validation_error("unknown_bound",
                         "no slope evaluator for bound: " + std::string(bound_name));
}

double slope_target(std::string_view bound_name, double alpha) {
  if (bound_name == "owpn_new_th4") return exact(alpha);
  if (bound_name == "owpn_old_th3") {
    // The older bound's own pre-log: it tracks the exact curve up to
    // alpha = 1/2 and keeps growing past it (which is what motivated the
    // newer bound), so its theory slope is (1+alpha)/2 throughout.
    if (alpha < 0.0 || !std::isfinite(alpha)) {
      throw validation_error("negative_alpha", "alpha must be finite and >= 0");
    }
    return 0.5 * (1.0 + alpha);
  }
  if (bound_name == "amplitude") return amplitude_prelog();
  if (bound_name == "phase") return phase_prelog(alpha);
  throw validation_error("unknown_bound",
                         "no slope target for bound: " + std::string(bound_name));
}

PrelogEstimate empirical_prelog(const BoundEvaluator& bound, double alpha,
                                double sigma2, const std::vector<double>& p_grid) {
  if (alpha < 0.0 || !std::isfinite(alpha)) {
    throw validation_error("negative_alpha", "alpha must be finite and >= 0");
  }
  if (p_grid.size() < 3) {
    throw validation_error("invalid_grid", "need at least three power points");
  }
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] > 1.0) || !std::isfinite(p_grid[i])) {
      throw validation_error("invalid_grid", "powers must be finite and > 1");
    }
    if (i > 0 && !(p_grid[i] > p_grid[i - 1])) {
      throw validation_error("invalid_grid", "powers must be strictly increasing");
    }
  }

  // Keep the top half (at least 3 points): the slope is an asymptotic
  // quantity and low-P points still carry O(1) curvature.
  const std::size_t keep = std::max<std::size_t>(3, (p_grid.size() + 1) / 2);
  const std::size_t first = p_grid.size() - keep;

  PrelogEstimate est;
  est.alpha = alpha;
  est.p_grid.assign(p_grid.begin() + static_cast<std::ptrdiff_t>(first), p_grid.end());

  std::vector<double> xs, ys;
  xs.reserve(keep);
  ys.reserve(keep);
  for (double p : est.p_grid) {
    const double l = real_oversampling_for(p, alpha);
    xs.push_back(std::log(p));
    ys.push_back(bound(p, sigma2, l));
  }

  // Ordinary least squares for y = slope * x + intercept.
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < keep; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(keep);
  my /= static_cast<double>(keep);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < keep; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  est.slope = sxy / sxx;
  const double intercept = my - est.slope * mx;
  for (std::size_t i = 0; i < keep; ++i) {
    est.residual =
        std::max(est.residual, std::fabs(est.slope * xs[i] + intercept - ys[i]));
  }
  return est;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw validation_error("invalid_grid",
                           "log grid needs 0 < lo < hi and n >= 2");
  }
  std::vector<double> out(n);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = std::exp(llo + t * (lhi - llo));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace owpn::gdof
