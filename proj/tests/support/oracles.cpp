#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

constexpr int kMaxIter = 1000;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

// Series representation, good for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("gamma_p_series did not converge");
}

// Modified Lentz continued fraction for Q(a, x), good for x >= a + 1.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
  }
  throw std::runtime_error("gamma_q_cf did not converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p needs a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q needs a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_cdf(double df, double x) { return regularized_gamma_p(df / 2.0, x / 2.0); }

double chi2_sf(double df, double x) { return regularized_gamma_q(df / 2.0, x / 2.0); }

double chi2_gof_pvalue_uniform(std::span<const std::size_t> counts) {
  if (counts.size() < 2) throw std::invalid_argument("need at least two bins");
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::invalid_argument("empty sample");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return chi2_sf(static_cast<double>(counts.size() - 1), stat);
}

double noncentral_chi2_cdf_2dof(double delta, double x) {
  if (delta < 0.0 || x < 0.0) throw std::invalid_argument("need delta, x >= 0");
  if (x == 0.0) return 0.0;
  if (delta == 0.0) return chi2_cdf(2.0, x);
  // F(x; 2, delta) = sum_j Pois(j; delta/2) * ChiSq_{2+2j}(x); the chi-square
  // CDF with 2 + 2j dof is P(1 + j, x/2).
  const double half = delta / 2.0;
  double weight = std::exp(-half);  // j = 0
  double cum_weight = 0.0;
  double sum = 0.0;
  for (int j = 0; j < 10000; ++j) {
    sum += weight * regularized_gamma_p(1.0 + j, x / 2.0);
    cum_weight += weight;
    if (1.0 - cum_weight < 1e-14) break;
    weight *= half / static_cast<double>(j + 1);
  }
  return std::min(sum, 1.0);
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double exact_mi_nats(const std::vector<std::vector<std::size_t>>& joint) {
  double total = 0.0;
  std::vector<double> row_sum(joint.size(), 0.0);
  std::vector<double> col_sum;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (col_sum.size() < joint[i].size()) col_sum.resize(joint[i].size(), 0.0);
    for (std::size_t j = 0; j < joint[i].size(); ++j) {
      row_sum[i] += static_cast<double>(joint[i][j]);
      col_sum[j] += static_cast<double>(joint[i][j]);
      total += static_cast<double>(joint[i][j]);
    }
  }
  if (total == 0.0) throw std::invalid_argument("empty joint histogram");
  double mi = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    for (std::size_t j = 0; j < joint[i].size(); ++j) {
      const double p = static_cast<double>(joint[i][j]) / total;
      if (p > 0.0) {
        mi += p * std::log(p * total * total / (row_sum[i] * col_sum[j]));
      }
    }
  }
  return std::max(mi, 0.0);
}

double sample_mean(std::span<const double> xs) {
  double m = 0.0;
  std::size_t n = 0;
  for (double x : xs) m += (x - m) / static_cast<double>(++n);
  return m;
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs n >= 2");
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  return m2 / static_cast<double>(n - 1);
}

}  // namespace oracles
