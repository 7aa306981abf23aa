#include "owpn/core.hpp"

#include <algorithm>

namespace owpn {

const char* units_name(Units units) { return units == Units::bits ? "bits" : "nats"; }

Units parse_units(std::string_view name) {
  if (name == "bits") return Units::bits;
  if (name == "nats") return Units::nats;
  throw validation_error("bad_units",
                         "unknown units '" + std::string(name) + "' (expected bits or nats)");
}

const ChannelParams& validate(const ChannelParams& params) {
  if (!std::isfinite(params.power) || !std::isfinite(params.sigma2) ||
      !std::isfinite(params.oversampling)) {
    throw validation_error("non_finite", "channel parameters must be finite");
  }
  if (params.power < 0.0) {
    throw validation_error("negative_power", "power must be >= 0");
  }
  if (params.sigma2 < 0.0) {
    throw validation_error("negative_noise_variance", "sigma2 must be >= 0");
  }
  if (params.oversampling < 1.0) {
    throw validation_error("zero_oversampling", "oversampling must be >= 1");
  }
  return params;
}

long integer_oversampling(const ChannelParams& params) {
  validate(params);
  const double l = params.oversampling;
  if (l != std::floor(l) || l > 1e15) {
    throw validation_error("zero_oversampling",
                           "simulation requires an integer oversampling factor");
  }
  return static_cast<long>(l);
}

long oversampling_for(double power, double alpha) {
  real_oversampling_for(power, alpha);  // argument validation
  return static_cast<long>(std::max(1.0, std::floor(std::pow(power, alpha))));
}

double real_oversampling_for(double power, double alpha) {
  if (alpha < 0.0) throw validation_error("negative_alpha", "alpha must be >= 0");
  if (power <= 0.0) throw validation_error("negative_power", "power must be > 0 for L = P^alpha");
  return std::max(1.0, std::pow(power, alpha));
}

double convert_units(double value_nats, Units units) {
  return units == Units::bits ? value_nats / kLn2 : value_nats;
}

double nats_from(double value, Units units) { return units == Units::bits ? value * kLn2 : value; }

bool BoundReport::flagged(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

void BoundReport::add_flag(std::string flag) {
  if (!flagged(flag)) flags.push_back(std::move(flag));
}

}  // namespace owpn
