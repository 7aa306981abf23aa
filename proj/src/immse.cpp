#include "owpn/immse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "owpn/bounds.hpp"
#include "owpn/csv.hpp"

namespace owpn::immse {

namespace {

constexpr double kVarianceTheta = kPi * kPi / 3.0;
constexpr std::size_t kMaxIterations = 1'000'000;

void check_ab(double a, double b) {
  if (a < 0.0 || b < 0.0 || !std::isfinite(a) || !std::isfinite(b)) {
    throw validation_error("invalid_fisher_parameters",
                           "fisher recursion needs finite a, b >= 0");
  }
}

double recursion_step(double a, double b, double j) {
  // Same map as (a + b) - a^2/(j + a), but that form silently drops b when
  // b < ulp(a) and then fixes j = 0; this one keeps b additive.
  return b + a * j / (j + a);
}

// f(rho) = 1/(rho + 1/V) - 1/(rho + c), the I-MMSE integrand: excess MMSE of
// the matched prior over the stationary estimator.
double integrand(double rho, double c) {
  return 1.0 / (rho + 1.0 / kVarianceTheta) - 1.0 / (rho + c);
}

struct SimpsonState {
  double c = 0.0;
  double tol = 0.0;
  int max_depth = 0;
  int depth_hit = 0;
};

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

// Classic recursive adaptive Simpson with Richardson correction. The
// integrand is smooth and monotone between knees, so depth stays shallow.
double adaptive_simpson(SimpsonState& st, double lo, double hi, double flo,
                        double fmid, double fhi, double whole, double tol,
                        int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid);
  const double rm = 0.5 * (mid + hi);
  const double flm = integrand(lm, st.c);
  const double frm = integrand(rm, st.c);
  const double left = simpson(flo, flm, fmid, mid - lo);
  const double right = simpson(fmid, frm, fhi, hi - mid);
  const double err = left + right - whole;
  if (depth >= st.max_depth) {
    st.depth_hit = std::max(st.depth_hit, depth);
    return left + right + err / 15.0;
  }
  if (std::fabs(err) <= 15.0 * tol) {
    return left + right + err / 15.0;
  }
  return adaptive_simpson(st, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth + 1) +
         adaptive_simpson(st, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth + 1);
}

double integrate_segment(SimpsonState& st, double lo, double hi, double tol) {
  if (!(hi > lo)) return 0.0;
  const double mid = 0.5 * (lo + hi);
  const double flo = integrand(lo, st.c);
  const double fmid = integrand(mid, st.c);
  const double fhi = integrand(hi, st.c);
  const double whole = simpson(flo, fmid, fhi, hi - lo);
  return adaptive_simpson(st, lo, hi, flo, fmid, fhi, whole, tol, 0);
}

}  // namespace

FisherParams fisher_params(const ChannelParams& params) {
  validate(params);
  if (!(params.sigma2 > 0.0)) {
    throw validation_error("negative_noise_variance",
                           "fisher parameters need sigma2 > 0");
  }
  return {params.oversampling / params.sigma2, params.per_sample_power()};
}

std::vector<double> fisher_recursion(double a, double b, std::size_t steps,
                                     double j0) {
  check_ab(a, b);
  if (j0 < 0.0 || !std::isfinite(j0)) {
    throw validation_error("invalid_fisher_parameters",
                           "initial information must be finite and >= 0");
  }
  std::vector<double> out;
  out.reserve(steps + 1);
  out.push_back(j0);
  double j = j0;
  for (std::size_t k = 0; k < steps; ++k) {
    j = recursion_step(a, b, j);
    out.push_back(j);
  }
  return out;
}

FixedPointResult fisher_fixed_point(double a, double b, double tol) {
  check_ab(a, b);
  if (!(tol > 0.0)) {
    throw validation_error("invalid_tolerance", "tolerance must be positive");
  }

  FixedPointResult result;
  // Closed form: positive root of J^2 - bJ - ab = 0.
  result.j_star = b == 0.0 ? 0.0 : 0.5 * b * (1.0 + std::sqrt(1.0 + 4.0 * a / b));

  if (a == 0.0 || b == 0.0) {
    // a = 0: J_1 = b and stays; b = 0: J decays to 0 geometrically but the
    // limit is exact, so report it directly.
    result.j_star_iterated = a == 0.0 ? b : 0.0;
    result.iterations = 1;
    result.residual = std::fabs(recursion_step(a, b, result.j_star_iterated) -
                                result.j_star_iterated);
    return result;
  }

  // The iterates live on the scale of J*, which the closed form provides up
  // front, so the stop rule can be made relative to it; scaling by a or b
  // instead would declare victory far too early when a >> J*.
  const double scale = std::max(1.0, result.j_star);
  double j = 0.0;
  double prev_delta = -1.0;  // sentinel: no ratio available yet
  bool converged = false;
  for (std::size_t k = 1; k <= kMaxIterations; ++k) {
    const double next = recursion_step(a, b, j);
    const double delta = std::fabs(next - j);
    j = next;
    result.iterations = k;
    if (delta == 0.0) {
      converged = true;
      break;
    }
    // The map contracts with an asymptotically constant ratio q, so the
    // distance to the limit is ~ delta * q/(1-q); stop on that estimate
    // rather than the raw step to avoid quitting 1/(1-q) steps too early
    // when q is close to 1 (a >> b).
    if (prev_delta > 0.0) {
      const double q = std::min(delta / prev_delta, 0.999999);
      if (delta * q / (1.0 - q) <= tol * scale) {
        converged = true;
        break;
      }
    }
    prev_delta = delta;
  }
  if (!converged) {
    throw numeric_error("non_convergence",
                        "fisher fixed point did not converge");
  }
  result.j_star_iterated = j;
  result.residual = std::fabs(recursion_step(a, b, j) - j);
  return result;
}

double final_step_information(double a, double b, double rho) {
  check_ab(a, b);
  if (rho < 0.0 || !std::isfinite(rho)) {
    throw validation_error("invalid_prior_precision",
                           "rho must be finite and >= 0");
  }
  // a J*/(J* + a) collapses to the cancellation-free effective precision.
  return rho + bounds::effective_precision(a, b);
}

double mmse_lower_bound(double a, double b, double rho) {
  const double j = final_step_information(a, b, rho);
  if (j == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / j;
}

EntropyBound immse_entropy_bound(double a, double b, QuadratureConfig cfg) {
  check_ab(a, b);
  if (!(cfg.tol > 0.0) || cfg.max_depth < 1) {
    throw validation_error("invalid_tolerance",
                           "quadrature needs tol > 0 and max_depth >= 1");
  }

  EntropyBound out;
  out.a = a;
  out.b = b;
  out.variance_theta = kVarianceTheta;
  out.c = bounds::effective_precision(a, b);

  if (out.c == 0.0) {
    // No information flows; the estimator entropy is the prior's and the
    // rate bound collapses to zero content. Mark it rather than feeding
    // log(0) downstream.
    out.degenerate = true;
    out.integral_quadrature = 0.0;
    out.integral_analytic = -std::numeric_limits<double>::infinity();
    out.quadrature_error = std::numeric_limits<double>::infinity();
    out.entropy_lower_bound = std::numeric_limits<double>::infinity();
    out.phase_rate_upper_bound = -std::numeric_limits<double>::infinity();
    return out;
  }

  // Integrate to a window past both knees (rho ~ c and rho ~ 1/V), then add
  // the analytic tail ln((rho0 + c)/(rho0 + 1/V)).
  const double knee_lo = std::min(out.c, 1.0 / kVarianceTheta);
  const double knee_hi = std::max(out.c, 1.0 / kVarianceTheta);
  const double rho0 = 10.0 * knee_hi;

  SimpsonState st;
  st.c = out.c;
  st.tol = cfg.tol;
  st.max_depth = cfg.max_depth;

  // Split at the knees so each segment is smooth at one scale.
  double total = 0.0;
  total += integrate_segment(st, 0.0, knee_lo, cfg.tol / 3.0);
  total += integrate_segment(st, knee_lo, knee_hi, cfg.tol / 3.0);
  total += integrate_segment(st, knee_hi, rho0, cfg.tol / 3.0);
  const double tail =
      std::log((rho0 + out.c) / (rho0 + 1.0 / kVarianceTheta));
  out.integral_quadrature = total + tail;

  out.integral_analytic = std::log(out.c * kVarianceTheta);
  out.quadrature_error =
      std::fabs(out.integral_quadrature - out.integral_analytic);

  out.entropy_lower_bound =
      0.5 * std::log(kTwoPi * std::exp(1.0) * kVarianceTheta) -
      0.5 * out.integral_quadrature;
  out.phase_rate_upper_bound = std::log(kTwoPi) - out.entropy_lower_bound;
  out.exceeds_prior_entropy = out.phase_rate_upper_bound > std::log(kTwoPi);
  return out;
}

void write_integrand_csv(std::ostream& out, double a, double b,
                         std::size_t n_points, double rho_max) {
  check_ab(a, b);
  if (n_points < 2) {
    throw validation_error("invalid_grid", "need at least two sample points");
  }
  const double c = bounds::effective_precision(a, b);
  if (rho_max <= 0.0) {
    rho_max = 10.0 * std::max(c, 1.0 / kVarianceTheta);
  }
  out << "rho,integrand,J_rho\n";
  for (std::size_t i = 0; i < n_points; ++i) {
    const double rho =
        rho_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
    out << csv::fmt17(rho) << ',' << csv::fmt17(integrand(rho, c)) << ','
        << csv::fmt17(rho + c) << '\n';
  }
}

}  // namespace owpn::immse
