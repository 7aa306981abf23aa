#pragma once

#include <string_view>

#include "owpn/core.hpp"

namespace owpn::bounds {

/// Noise regimes of the single-sample (L = 1) phase-noise capacity bound.
/// The selector is an ordered partition of (P > 0, sigma2 >= 0):
///   sigma2 >  2pi/e          -> large_noise
///   1/P <= sigma2 <= 2pi/e   -> intermediate
///   sigma2 <  1/P            -> small_noise
/// Boundary ties fall to intermediate, whose inequalities are non-strict.
enum class WpnRegime { large_noise, intermediate, small_noise };

const char* regime_name(WpnRegime regime);

/// Requires P > 0 to place the 1/P threshold.
WpnRegime classify_wpn_regime(double power, double sigma2);

/// Capacity gap constant (bpcu) attached to each regime.
double wpn_gap_bpcu(WpnRegime regime);

/// Three-regime outer bound for the L = 1 channel. The regime constants are
/// stated per reporting base (log e is 1 in nats, 1/ln 2 in bits), so the
/// value is formed directly in the requested units; diagnostics record the
/// log e factor used.
BoundReport wpn_outer_bound(const ChannelParams& params);

/// Older oversampled outer bound 0.5 log(1 + P/2) + 0.5 log(2 pi L /(e sigma2))
/// plus a caller-supplied O(1) constant (in nats, default 0, recorded in
/// diagnostics). sigma2 = 0 yields +inf with an "infinite" flag.
BoundReport owpn_old_outer_bound(const ChannelParams& params, double o1_nats = 0.0);

/// Amplitude-channel rate bound 0.5 log(2 pi e (P + 2)) — the entropy bound
/// on the noncentral chi-square block statistic. No L or sigma2 dependence.
double amplitude_rate_bound_nats(double power);
BoundReport amplitude_rate_bound(const ChannelParams& params);

/// Effective prior precision c = (b/2)(sqrt(1 + 4a/b) - 1) with a = L/sigma2,
/// b = P/L, evaluated in the cancellation-free form 2a/(sqrt(1 + 4a/b) + 1).
double effective_precision(double a, double b);

/// Phase-channel rate bound 0.5 log(2 pi / e) + 0.5 log(c), unclamped.
/// Can be negative at tiny P (vacuous but analytically correct) and can
/// exceed log 2 pi at large c; slope analysis uses this raw value.
double phase_rate_bound_raw_nats(double power, double sigma2, double oversampling);

/// Reported phase-channel bound, clamped to [0, log 2pi] with the clamp and
/// the raw value recorded in diagnostics.
BoundReport phase_rate_bound(const ChannelParams& params);

/// Oversampled-channel outer bound
///   0.5 log(1 + P/2) + log(2 pi) + 0.5 log(L^{-1} P (sqrt(1 + 4 L^2/(sigma2 P)) - 1)),
/// identically the sum of the amplitude and (unclamped) phase rate bounds.
double owpn_new_outer_bound_nats(double power, double sigma2, double oversampling);

/// Report form; diagnostics carry both decompositions (amplitude/phase rate
/// bounds and the half-log-SNR + chi-square entropy reading).
BoundReport owpn_new_outer_bound(const ChannelParams& params);

/// Closed-form evaluator lookup by CLI bound name: one of wpn_th1,
/// owpn_old_th3, owpn_new_th4, amplitude, phase.
BoundReport evaluate(std::string_view bound_name, const ChannelParams& params,
                     double o1_nats = 0.0);

bool is_known_bound(std::string_view bound_name);

}  // namespace owpn::bounds
