#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "owpn/core.hpp"

namespace owpn::immse {

/// Recursion parameters: a = L/sigma2 is the per-step phase-increment
/// precision, b = P/L the per-sample SNR-like drive term.
struct FisherParams {
  double a = 1.0;
  double b = 1.0;
};

FisherParams fisher_params(const ChannelParams& params);

/// Iterates J_k = (a + b) - a^2/(J_{k-1} + a) for k = 1..steps starting from
/// j0 and returns the whole trajectory (j0 first, so steps+1 entries).
std::vector<double> fisher_recursion(double a, double b, std::size_t steps,
                                     double j0 = 0.0);

struct FixedPointResult {
  double j_star = 0.0;           // closed form (b/2)(1 + sqrt(1 + 4a/b))
  double j_star_iterated = 0.0;  // value the recursion settled on
  std::size_t iterations = 0;
  double residual = 0.0;  // |J - ((a+b) - a^2/(J+a))| at the iterate
};

/// Runs the recursion to convergence and pairs the result with the closed
/// form. The iteration contracts with ratio (a/(J*+a))^2, which approaches 1
/// for a >> b, hence the generous cap; throws numeric_error("non_convergence")
/// if the cap is hit without meeting the (scale-aware) tolerance.
FixedPointResult fisher_fixed_point(double a, double b, double tol = 1e-12);

/// Stationary per-sample information J(rho) = rho + c where
/// c = a J*/(J* + a); rho is the prior precision of the phase estimate.
double final_step_information(double a, double b, double rho);

/// MMSE lower bound 1/J(rho) from the Cramer-Rao side; +inf when the channel
/// carries no phase information and the prior is flat (b = 0, rho = 0).
double mmse_lower_bound(double a, double b, double rho);

struct QuadratureConfig {
  double tol = 1e-9;  // absolute tolerance on the integral, nats
  int max_depth = 48;
};

/// Everything the entropy-rate machinery produces for one (a, b) point.
struct EntropyBound {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;                   // effective precision a J*/(J* + a)
  double variance_theta = 0.0;      // matched prior variance V = pi^2/3
  double integral_quadrature = 0.0; // adaptive Simpson value of int_0^inf f
  double integral_analytic = 0.0;   // ln(c V), the closed form
  double quadrature_error = 0.0;    // |quadrature - analytic|
  double entropy_lower_bound = 0.0;      // 0.5 ln(2 pi e V) - 0.5 integral
  double phase_rate_upper_bound = 0.0;   // ln 2pi - entropy_lower_bound
  bool exceeds_prior_entropy = false;    // raw bound above ln 2pi
  bool degenerate = false;               // b = 0: no information flows
};

/// I-MMSE bridge: integrates f(rho) = 1/(rho + 1/V) - 1/(rho + c) over
/// rho in [0, inf) (adaptive Simpson on a finite window plus the analytic
/// tail) and assembles the differential-entropy and rate bounds.
EntropyBound immse_entropy_bound(double a, double b, QuadratureConfig cfg = {});

/// Integrand sample rows "rho,integrand,J_rho" for plotting/debugging.
void write_integrand_csv(std::ostream& out, double a, double b,
                         std::size_t n_points = 200, double rho_max = 0.0);

}  // namespace owpn::immse
