#include "owpn/bounds.hpp"

#include <cmath>
#include <limits>

namespace owpn::bounds {

namespace {

constexpr double kLargeNoiseThreshold = kTwoPi / 2.718281828459045235360287;

// q = exp(-2 pi / e), the wrap probability mass entering the large-noise
// regime constant.
const double kWrapQ = std::exp(-kLargeNoiseThreshold);

double half_log_snr_nats(double power) { return 0.5 * std::log1p(power / 2.0); }

}  // namespace

const char* regime_name(WpnRegime regime) {
  switch (regime) {
    case WpnRegime::large_noise:
      return "large_noise";
    case WpnRegime::intermediate:
      return "intermediate";
    case WpnRegime::small_noise:
      return "small_noise";
  }
  return "unknown";
}

WpnRegime classify_wpn_regime(double power, double sigma2) {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw validation_error("undefined_at_zero_power",
                           "wpn_th1 regime thresholds need finite P > 0");
  }
  if (sigma2 < 0.0 || !std::isfinite(sigma2)) {
    throw validation_error("negative_noise_variance",
                           "sigma2 must be finite and >= 0");
  }
  // Ordered tests: for P < e/(2 pi) the raw regime inequalities overlap
  // (1/P > 2pi/e), so large-noise wins first and the remaining comparison
  // against 1/P is only consulted inside [0, 2pi/e].
  if (sigma2 > kLargeNoiseThreshold) return WpnRegime::large_noise;
  if (sigma2 >= 1.0 / power) return WpnRegime::intermediate;
  return WpnRegime::small_noise;
}

double wpn_gap_bpcu(WpnRegime regime) {
  switch (regime) {
    case WpnRegime::large_noise:
      return 4.0;
    case WpnRegime::intermediate:
      return 7.36;
    case WpnRegime::small_noise:
      return 1.8;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

BoundReport wpn_outer_bound(const ChannelParams& params) {
  validate(params);
  if (params.oversampling != 1.0) {
    throw validation_error("requires_unit_oversampling",
                           "wpn_th1 is defined for L = 1 only");
  }
  const double P = params.power;
  const double s2 = params.sigma2;
  const WpnRegime regime = classify_wpn_regime(P, s2);

  // log e in the reporting base: the regime constants are stated per base,
  // so everything below is formed directly in the requested units.
  const double log_e = params.units == Units::bits ? 1.0 / kLn2 : 1.0;
  const auto lg = [log_e](double v) { return log_e * std::log(v); };

  double extra = 0.0;
  switch (regime) {
    case WpnRegime::large_noise:
      extra = 0.5 * lg(4.0 * kPi * std::exp(1.0)) +
              2.0 * kWrapQ / (1.0 - kWrapQ) * log_e;
      break;
    case WpnRegime::intermediate:
      extra = 0.5 * lg(2.0 / s2) + lg(kTwoPi) + log_e * log_e;
      break;
    case WpnRegime::small_noise:
      extra = 0.5 * log_e * std::log1p(P / 2.0);
      break;
  }
  const double half_log_snr = 0.5 * log_e * std::log1p(P / 2.0);

  BoundReport report;
  report.bound_name = "wpn_th1";
  report.value = half_log_snr + extra;
  report.units = params.units;
  report.regime = regime_name(regime);
  report.diagnostics["half_log_snr"] = half_log_snr;
  report.diagnostics["regime_extra"] = extra;
  report.diagnostics["gap_bpcu"] = wpn_gap_bpcu(regime);
  report.diagnostics["log_e"] = log_e;
  return report;
}

BoundReport owpn_old_outer_bound(const ChannelParams& params, double o1_nats) {
  validate(params);
  if (!std::isfinite(o1_nats)) {
    throw validation_error("non_finite", "o1 constant must be finite");
  }
  const double P = params.power;
  const double L = params.oversampling;

  BoundReport report;
  report.bound_name = "owpn_old_th3";
  report.units = params.units;
  report.diagnostics["o1_nats"] = o1_nats;

  if (params.sigma2 == 0.0) {
    // The oversampling term diverges; keep the report well-formed instead of
    // throwing so sweeps across sigma2 = 0 stay usable.
    report.value = std::numeric_limits<double>::infinity();
    report.add_flag("infinite");
    return report;
  }

  const double nats = half_log_snr_nats(P) +
                      0.5 * std::log(kTwoPi * L / (std::exp(1.0) * params.sigma2)) +
                      o1_nats;
  report.value = convert_units(nats, params.units);
  report.diagnostics["half_log_snr_nats"] = half_log_snr_nats(P);
  return report;
}

double amplitude_rate_bound_nats(double power) {
  if (power < 0.0 || !std::isfinite(power)) {
    throw validation_error("negative_power", "P must be finite and >= 0");
  }
  return 0.5 * std::log(kTwoPi * std::exp(1.0) * (power + 2.0));
}

BoundReport amplitude_rate_bound(const ChannelParams& params) {
  validate(params);
  BoundReport report;
  report.bound_name = "amplitude";
  report.units = params.units;
  report.value = convert_units(amplitude_rate_bound_nats(params.power), params.units);
  return report;
}

double effective_precision(double a, double b) {
  if (a < 0.0 || b < 0.0 || !std::isfinite(a) || !std::isfinite(b)) {
    throw validation_error("invalid_fisher_parameters",
                           "effective precision needs finite a, b >= 0");
  }
  if (a == 0.0) return 0.0;
  if (b == 0.0) return 0.0;  // limit of 2a/(sqrt(1 + 4a/b) + 1) as b -> 0
  // (b/2)(sqrt(1 + 4a/b) - 1) rewritten to avoid cancellation when 4a/b is
  // tiny; both forms agree, this one stays accurate for a << b as well.
  return 2.0 * a / (std::sqrt(1.0 + 4.0 * a / b) + 1.0);
}

double phase_rate_bound_raw_nats(double power, double sigma2, double oversampling) {
  if (!(power > 0.0) || !(sigma2 > 0.0) || !(oversampling >= 1.0) ||
      !std::isfinite(power) || !std::isfinite(sigma2) || !std::isfinite(oversampling)) {
    throw validation_error("invalid_phase_bound_parameters",
                           "phase rate bound needs P > 0, sigma2 > 0, L >= 1");
  }
  const double a = oversampling / sigma2;
  const double b = power / oversampling;
  const double c = effective_precision(a, b);
  return 0.5 * std::log(kTwoPi / std::exp(1.0)) + 0.5 * std::log(c);
}

BoundReport phase_rate_bound(const ChannelParams& params) {
  validate(params);
  const double raw =
      phase_rate_bound_raw_nats(params.power, params.sigma2, params.oversampling);

  BoundReport report;
  report.bound_name = "phase";
  report.units = params.units;
  report.diagnostics["raw_nats"] = raw;
  report.diagnostics["c"] =
      effective_precision(params.oversampling / params.sigma2, params.per_sample_power());

  // A rate bound on a circular observation is vacuous outside [0, log 2pi];
  // report the clamped value but keep the raw one for slope work.
  double nats = raw;
  if (nats < 0.0) {
    nats = 0.0;
    report.add_flag("clamped_below");
  } else if (nats > std::log(kTwoPi)) {
    nats = std::log(kTwoPi);
    report.add_flag("clamped_above");
  }
  report.value = convert_units(nats, params.units);
  return report;
}

double owpn_new_outer_bound_nats(double power, double sigma2, double oversampling) {
  if (!(power > 0.0) || !(sigma2 > 0.0) || !(oversampling >= 1.0) ||
      !std::isfinite(power) || !std::isfinite(sigma2) || !std::isfinite(oversampling)) {
    throw validation_error("invalid_bound_parameters",
                           "owpn_new_th4 needs P > 0, sigma2 > 0, L >= 1");
  }
  // L^{-1} P (sqrt(1 + 4 L^2/(sigma2 P)) - 1) is exactly 2c with
  // c = effective_precision(L/sigma2, P/L).
  const double c = effective_precision(oversampling / sigma2, power / oversampling);
  return half_log_snr_nats(power) + std::log(kTwoPi) + 0.5 * std::log(2.0 * c);
}

BoundReport owpn_new_outer_bound(const ChannelParams& params) {
  validate(params);
  if (!(params.power > 0.0) || !(params.sigma2 > 0.0)) {
    throw validation_error("invalid_bound_parameters",
                           "owpn_new_th4 needs P > 0 and sigma2 > 0");
  }
  const double P = params.power;
  const double L = params.oversampling;
  const double c = effective_precision(L / params.sigma2, P / L);

  const double half_log_snr = half_log_snr_nats(P);
  const double amplitude = amplitude_rate_bound_nats(P);
  const double phase_raw = phase_rate_bound_raw_nats(P, params.sigma2, L);
  const double nats = half_log_snr + std::log(kTwoPi) + 0.5 * std::log(2.0 * c);

  BoundReport report;
  report.bound_name = "owpn_new_th4";
  report.units = params.units;
  report.value = convert_units(nats, params.units);
  report.diagnostics["amplitude_rate_nats"] = amplitude;
  report.diagnostics["phase_rate_raw_nats"] = phase_raw;
  report.diagnostics["half_log_snr_term_nats"] = half_log_snr;
  report.diagnostics["chi_square_entropy_term_nats"] = amplitude - half_log_snr;
  report.diagnostics["c"] = c;
  return report;
}

BoundReport evaluate(std::string_view bound_name, const ChannelParams& params,
                     double o1_nats) {
  if (bound_name == "wpn_th1") return wpn_outer_bound(params);
  if (bound_name == "owpn_old_th3") return owpn_old_outer_bound(params, o1_nats);
  if (bound_name == "owpn_new_th4") return owpn_new_outer_bound(params);
  if (bound_name == "amplitude") return amplitude_rate_bound(params);
  if (bound_name == "phase") return phase_rate_bound(params);
  throw validation_error("unknown_bound",
                         "unknown bound name: " + std::string(bound_name));
}

bool is_known_bound(std::string_view bound_name) {
  return bound_name == "wpn_th1" || bound_name == "owpn_old_th3" ||
         bound_name == "owpn_new_th4" || bound_name == "amplitude" ||
         bound_name == "phase";
}

}  // namespace owpn::bounds
