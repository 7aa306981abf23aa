#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace owpn {

inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

/// Reporting units. All internal math is in nats; bits appear only at the
/// reporting boundary.
enum class Units { bits, nats };

const char* units_name(Units units);
Units parse_units(std::string_view name);

/// Bad or inconsistent user input (maps to CLI exit code 1).
class validation_error : public std::invalid_argument {
 public:
  validation_error(std::string code, const std::string& what)
      : std::invalid_argument(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// A numerical routine failed to meet its contract (maps to CLI exit code 2).
class numeric_error : public std::runtime_error {
 public:
  numeric_error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Channel parameter tuple shared by every module.
///
/// power   : average transmit waveform power P; the per-sample budget is P/L
///           and the SNR is P/2 (the additive noise has E|W|^2 = 2).
/// sigma2  : frequency-noise variance per symbol interval; the per-sample
///           phase increment variance is sigma2/L.
/// oversampling : receiver samples per symbol interval, >= 1. Stored as a
///           real so closed-form bounds can be swept over L = P^alpha without
///           quantizing; simulation entry points additionally require an
///           integer value.
struct ChannelParams {
  double power = 1.0;
  double sigma2 = 1.0;
  double oversampling = 1.0;
  Units units = Units::nats;

  double per_sample_power() const { return power / oversampling; }
  double snr() const { return power / 2.0; }
};

/// Validates all ChannelParams invariants and returns the input unchanged.
/// Throws validation_error with code "non_finite", "negative_power",
/// "negative_noise_variance" or "zero_oversampling".
const ChannelParams& validate(const ChannelParams& params);

/// Validates that oversampling is a positive integer (simulation contexts)
/// and returns it as such.
long integer_oversampling(const ChannelParams& params);

/// Oversampling growth rule L(P) = max(1, floor(P^alpha)).
long oversampling_for(double power, double alpha);

/// Real-valued variant max(1, P^alpha) used when evaluating closed forms on
/// sweeps; the floor is applied only where a simulator needs an integer.
double real_oversampling_for(double power, double alpha);

/// nats -> requested units. Bits are nats / ln 2.
double convert_units(double value_nats, Units units);

/// requested units -> nats.
double nats_from(double value, Units units);

/// Named bound value with regime and diagnostic metadata.
struct BoundReport {
  std::string bound_name;
  double value = 0.0;  // in `units`
  Units units = Units::nats;
  std::optional<std::string> regime;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> flags;  // e.g. "clamped_below", "infinite"

  bool flagged(std::string_view flag) const;
  void add_flag(std::string flag);
};

}  // namespace owpn
