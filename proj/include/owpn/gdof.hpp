#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "owpn/core.hpp"

namespace owpn::gdof {

/// Exact degrees-of-freedom curve for oversampling exponent alpha >= 0:
/// (1 + alpha)/2 on [0, 1/2], saturating at 3/4 beyond. Piecewise linear,
/// continuous at alpha = 1/2.
double exact(double alpha);

/// Matching lower bound (the achievable side); coincides with exact() here.
double lower_bound(double alpha);

/// Pre-log targets for the individual rate components under L ~ P^alpha.
double amplitude_prelog();
double phase_prelog(double alpha);

/// Evaluates a named bound in nats at (P, sigma2, L) with L real-valued;
/// the slope extraction works on closed forms, so fractional L is fine.
using BoundEvaluator = std::function<double(double power, double sigma2, double oversampling)>;

/// Closed-form evaluator for getting pre-log slopes out of a bound family.
/// Names: owpn_new_th4, owpn_old_th3, amplitude, phase (phase is the raw,
/// unclamped rate bound — clamping would flatten exactly the slopes this
/// is meant to measure).
BoundEvaluator evaluator(std::string_view bound_name);

/// Slope the named bound should produce at exponent alpha (in units of
/// log P): the exact curve for owpn_new_th4, (1+alpha)/2 for owpn_old_th3
/// (which overshoots the exact curve past alpha = 1/2), the component
/// pre-logs for amplitude/phase.
double slope_target(std::string_view bound_name, double alpha);

struct PrelogEstimate {
  double alpha = 0.0;
  double slope = 0.0;     // d(nats)/d(ln P) from least squares
  double residual = 0.0;  // max |fit - sample| over the points used
  std::vector<double> p_grid;  // the P values the fit consumed
};

/// Fits nats = slope * ln P + const over the top half of a strictly
/// increasing power grid (at least max(3, ceil(n/2)) points) with
/// L = max(1, P^alpha) fed to the evaluator. The lower grid points only
/// anchor convergence visually; they are excluded so transient O(1) terms
/// do not bias the slope.
PrelogEstimate empirical_prelog(const BoundEvaluator& bound, double alpha,
                                double sigma2, const std::vector<double>& p_grid);

/// n log-spaced points from lo to hi inclusive (n >= 2, 0 < lo < hi).
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

}  // namespace owpn::gdof
