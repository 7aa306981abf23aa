// owpn — command-line front end for the Wiener phase-noise channel lab.
//
// Subcommands: bound eval | bound sweep | gdof | immse verify |
//              simulate stats | simulate rate
// Exit codes:  0 success, 1 usage/validation error, 2 numerical or
//              invariant failure.
//
// All CSV output is buffered and written in one piece only after the
// computation succeeded, so a failing run never leaves a partial file.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "owpn/achievability.hpp"
#include "owpn/bounds.hpp"
#include "owpn/channel.hpp"
#include "owpn/core.hpp"
#include "owpn/csv.hpp"
#include "owpn/experiments.hpp"
#include "owpn/gdof.hpp"
#include "owpn/immse.hpp"

namespace {

using owpn::csv::fmt17;

std::size_t worker_count(std::size_t n_tasks) {
  std::size_t n = 0;
  if (const char* env = std::getenv("OWPN_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || parsed < 0) {
      throw owpn::validation_error("bad_threads", "OWPN_THREADS must be a non-negative integer");
    }
    n = static_cast<std::size_t>(parsed);
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::min(n, std::max<std::size_t>(1, n_tasks));
}

// Evaluates fn(0..n-1) on the worker pool and returns results in index
// order; the first exception (if any) is rethrown after all threads join.
// Output order is fixed by the index, never by completion order.
template <typename Fn>
std::vector<std::string> parallel_rows(std::size_t n, Fn&& fn) {
  std::vector<std::string> rows(n);
  const std::size_t workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = fn(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          rows[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) {
    throw owpn::validation_error("bad_output_path", "cannot open output file: " + out_path);
  }
  out << text;
  if (!out.good()) {
    throw owpn::validation_error("bad_output_path", "write failed: " + out_path);
  }
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

// ---------------------------------------------------------------- bound ----

struct BoundOptions {
  std::vector<std::string> bounds;
  std::vector<double> powers;
  double power_start = 0.0, power_stop = 0.0;
  std::size_t power_points = 0;
  std::vector<double> sigma2s{1.0};
  std::vector<double> oversamplings;
  std::vector<double> alphas;
  std::string units = "nats";
  double o1_nats = 0.0;
  std::string out_path;
  bool pretty = false;
};

struct SweepPoint {
  double power = 0.0;
  double sigma2 = 0.0;
  double oversampling = 1.0;  // resolved integer L when the sweep is over alpha
  double alpha = -1.0;        // < 0 means "not an alpha sweep"
  std::string bound;
};

std::string sweep_row(const SweepPoint& pt, owpn::Units units, double o1_nats) {
  owpn::ChannelParams params;
  params.power = pt.power;
  params.sigma2 = pt.sigma2;
  params.oversampling = pt.oversampling;
  params.units = units;
  const owpn::BoundReport report = owpn::bounds::evaluate(pt.bound, params, o1_nats);
  std::ostringstream row;
  row << fmt17(pt.power) << ',' << fmt17(pt.sigma2) << ',' << fmt17(pt.oversampling) << ','
      << (pt.alpha >= 0.0 ? fmt17(pt.alpha) : std::string()) << ',' << report.bound_name << ','
      << owpn::units_name(report.units) << ',' << fmt17(report.value) << ','
      << report.regime.value_or("") << ',' << join_flags(report.flags) << '\n';
  return row.str();
}

constexpr const char* kSweepHeader = "P,sigma2,L,alpha,bound,units,value,regime,flags\n";

std::vector<SweepPoint> build_grid(const BoundOptions& opt) {
  std::vector<double> powers = opt.powers;
  if (powers.empty()) {
    if (opt.power_points == 0) {
      throw owpn::validation_error("missing_power",
                                   "supply --power values or --power-start/stop/points");
    }
    powers = owpn::gdof::log_spaced(opt.power_start, opt.power_stop, opt.power_points);
  }
  if (opt.sigma2s.empty() || opt.bounds.empty()) {
    throw owpn::validation_error("invalid_grid", "sigma2 list and bound list must be non-empty");
  }
  if (!opt.alphas.empty() && !opt.oversamplings.empty()) {
    throw owpn::validation_error("invalid_grid",
                                 "sweep over either --oversampling or --alpha, not both");
  }

  std::vector<SweepPoint> grid;
  for (double p : powers) {
    for (double s2 : opt.sigma2s) {
      if (!opt.alphas.empty()) {
        for (double alpha : opt.alphas) {
          for (const auto& bound : opt.bounds) {
            SweepPoint pt;
            pt.power = p;
            pt.sigma2 = s2;
            pt.alpha = alpha;
            pt.oversampling = static_cast<double>(owpn::oversampling_for(p, alpha));
            pt.bound = bound;
            grid.push_back(pt);
          }
        }
      } else {
        const std::vector<double> ls = opt.oversamplings.empty() ? std::vector<double>{1.0}
                                                                 : opt.oversamplings;
        for (double l : ls) {
          for (const auto& bound : opt.bounds) {
            SweepPoint pt;
            pt.power = p;
            pt.sigma2 = s2;
            pt.oversampling = l;
            pt.bound = bound;
            grid.push_back(pt);
          }
        }
      }
    }
  }
  return grid;
}

int cmd_bound_eval(const BoundOptions& opt) {
  if (opt.bounds.size() != 1 || opt.powers.size() != 1 || opt.sigma2s.size() != 1 ||
      opt.oversamplings.size() > 1 || opt.alphas.size() > 1) {
    throw owpn::validation_error("invalid_grid",
                                 "bound eval takes a single value per parameter");
  }
  const owpn::Units units = owpn::parse_units(opt.units);

  SweepPoint pt;
  pt.power = opt.powers.front();
  pt.sigma2 = opt.sigma2s.front();
  pt.bound = opt.bounds.front();
  if (!opt.alphas.empty()) {
    pt.alpha = opt.alphas.front();
    pt.oversampling = static_cast<double>(owpn::oversampling_for(pt.power, pt.alpha));
  } else if (!opt.oversamplings.empty()) {
    pt.oversampling = opt.oversamplings.front();
  }

  const std::string csv = std::string(kSweepHeader) + sweep_row(pt, units, opt.o1_nats);
  if (!opt.out_path.empty()) write_output(csv, opt.out_path);

  if (opt.pretty) {
    owpn::ChannelParams params;
    params.power = pt.power;
    params.sigma2 = pt.sigma2;
    params.oversampling = pt.oversampling;
    params.units = units;
    const auto report = owpn::bounds::evaluate(pt.bound, params, opt.o1_nats);
    std::ostringstream text;
    text << report.bound_name << "(P=" << fmt17(pt.power) << ", sigma2=" << fmt17(pt.sigma2)
         << ", L=" << fmt17(pt.oversampling) << ") = " << fmt17(report.value) << ' '
         << owpn::units_name(report.units) << '\n';
    if (report.regime) text << "  regime: " << *report.regime << '\n';
    for (const auto& [key, value] : report.diagnostics)
      text << "  " << key << " = " << fmt17(value) << '\n';
    if (!report.flags.empty()) text << "  flags: " << join_flags(report.flags) << '\n';
    std::cout << text.str();
  } else if (opt.out_path.empty()) {
    write_output(csv, "");
  }
  return 0;
}

int cmd_bound_sweep(const BoundOptions& opt) {
  const owpn::Units units = owpn::parse_units(opt.units);
  const std::vector<SweepPoint> grid = build_grid(opt);
  const std::vector<std::string> rows = parallel_rows(
      grid.size(), [&](std::size_t i) { return sweep_row(grid[i], units, opt.o1_nats); });

  std::string csv = kSweepHeader;
  for (const auto& row : rows) csv += row;
  write_output(csv, opt.out_path);
  if (opt.pretty) {
    std::cerr << "swept " << grid.size() << " rows"
              << (opt.out_path.empty() ? "" : " -> " + opt.out_path) << '\n';
  }
  return 0;
}

// ----------------------------------------------------------------- gdof ----

struct GdofOptions {
  std::vector<double> alphas;
  std::string bound = "owpn_new_th4";
  double sigma2 = 1.0;
  double power_start = 1e4, power_stop = 1e8;
  std::size_t power_points = 9;
  double tol = 0.0;  // 0 disables the slope gate
  std::string out_path;
  bool pretty = false;
};

int cmd_gdof(const GdofOptions& opt) {
  if (opt.alphas.empty()) {
    throw owpn::validation_error("invalid_grid", "supply at least one --alpha");
  }
  const auto p_grid = owpn::gdof::log_spaced(opt.power_start, opt.power_stop, opt.power_points);
  const auto bound = owpn::gdof::evaluator(opt.bound);

  std::ostringstream points;
  points << "alpha,P,L,bound_name,value_nats\n";
  std::ostringstream summary;
  summary << "alpha,slope,target,abs_error\n";
  std::ostringstream human;

  double worst = 0.0;
  for (double alpha : opt.alphas) {
    for (double p : p_grid) {
      const double l = owpn::real_oversampling_for(p, alpha);
      points << fmt17(alpha) << ',' << fmt17(p) << ',' << fmt17(l) << ',' << opt.bound << ','
             << fmt17(bound(p, opt.sigma2, l)) << '\n';
    }
    const auto est = owpn::gdof::empirical_prelog(bound, alpha, opt.sigma2, p_grid);
    const double target = owpn::gdof::slope_target(opt.bound, alpha);
    const double abs_error = std::fabs(est.slope - target);
    worst = std::max(worst, abs_error);
    summary << fmt17(alpha) << ',' << fmt17(est.slope) << ',' << fmt17(target) << ','
            << fmt17(abs_error) << '\n';
    human << "alpha=" << fmt17(alpha) << ": slope=" << fmt17(est.slope)
          << " target=" << fmt17(target) << " abs_error=" << fmt17(abs_error) << '\n';
  }

  const std::string csv = points.str() + "\n" + summary.str();
  if (opt.pretty) {
    if (!opt.out_path.empty()) write_output(csv, opt.out_path);
    std::cout << human.str();
  } else {
    write_output(csv, opt.out_path);
  }
  if (opt.tol > 0.0 && worst > opt.tol) {
    std::cerr << "slope error " << fmt17(worst) << " exceeds tolerance " << fmt17(opt.tol)
              << '\n';
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------- immse ----

struct ImmseOptions {
  double grid_min = 1e-3, grid_max = 1e3;
  std::size_t grid_points = 7;
  std::vector<double> a_values;  // explicit single point (with b)
  std::vector<double> b_values;
  double power = 0.0, sigma2 = 0.0, oversampling = 1.0;
  bool have_params = false;
  double tol = 1e-6;
  double perturb = 0.0;
  std::string dump_integrand;
  std::string out_path;
  bool pretty = false;
};

// |x - y| that treats two identically non-finite values as equal; a finite
// value against a non-finite one is an unconditional failure.
double robust_diff(double x, double y) {
  if (std::isfinite(x) && std::isfinite(y)) return std::fabs(x - y);
  if (std::isnan(x) && std::isnan(y)) return 0.0;
  if (std::isinf(x) && std::isinf(y) && (x > 0) == (y > 0)) return 0.0;
  return std::numeric_limits<double>::infinity();
}

int cmd_immse_verify(const ImmseOptions& opt) {
  std::vector<std::pair<double, double>> pts;
  if (!opt.a_values.empty() || !opt.b_values.empty()) {
    if (opt.a_values.size() != 1 || opt.b_values.size() != 1) {
      throw owpn::validation_error("invalid_grid", "--a and --b must be given together, once");
    }
    pts.emplace_back(opt.a_values.front(), opt.b_values.front());
  } else if (opt.have_params) {
    owpn::ChannelParams params;
    params.power = opt.power;
    params.sigma2 = opt.sigma2;
    params.oversampling = opt.oversampling;
    const auto fp = owpn::immse::fisher_params(params);
    pts.emplace_back(fp.a, fp.b);
  } else {
    const auto axis = owpn::gdof::log_spaced(opt.grid_min, opt.grid_max, opt.grid_points);
    for (double a : axis)
      for (double b : axis) pts.emplace_back(a, b);
  }
  if (!opt.dump_integrand.empty() && pts.size() != 1) {
    throw owpn::validation_error("invalid_grid",
                                 "--dump-integrand needs a single (a, b) point");
  }

  std::ostringstream csv;
  csv << "a,b,j_star_iter,j_star_closed,c,integral_quad,integral_analytic,"
         "phase_bound_immse,phase_bound_closed,max_abs_error\n";
  double worst = 0.0;
  for (const auto& [a, b] : pts) {
    const auto fp = owpn::immse::fisher_fixed_point(a, b);
    auto eb = owpn::immse::immse_entropy_bound(a, b);
    if (opt.perturb != 0.0) {
      // Test hook: shift the quadrature result so the cross-check trips.
      eb.integral_quadrature += opt.perturb;
      eb.quadrature_error = std::fabs(eb.integral_quadrature - eb.integral_analytic);
      eb.entropy_lower_bound =
          0.5 * std::log(owpn::kTwoPi * std::exp(1.0) * eb.variance_theta) -
          0.5 * eb.integral_quadrature;
      eb.phase_rate_upper_bound = std::log(owpn::kTwoPi) - eb.entropy_lower_bound;
    }
    // The closed-form reading of the same bound, through the c identity.
    const double c_ident = fp.j_star > 0.0 ? a * fp.j_star / (fp.j_star + a) : 0.0;
    const double phase_closed =
        eb.c > 0.0 ? 0.5 * std::log(owpn::kTwoPi / std::exp(1.0)) + 0.5 * std::log(eb.c)
                   : -std::numeric_limits<double>::infinity();

    double err = robust_diff(fp.j_star_iterated, fp.j_star);
    err = std::max(err, robust_diff(c_ident, eb.c));
    err = std::max(err, robust_diff(eb.integral_quadrature, eb.integral_analytic));
    err = std::max(err, robust_diff(eb.phase_rate_upper_bound, phase_closed));
    worst = std::max(worst, err);

    csv << fmt17(a) << ',' << fmt17(b) << ',' << fmt17(fp.j_star_iterated) << ','
        << fmt17(fp.j_star) << ',' << fmt17(eb.c) << ',' << fmt17(eb.integral_quadrature) << ','
        << fmt17(eb.integral_analytic) << ',' << fmt17(eb.phase_rate_upper_bound) << ','
        << fmt17(phase_closed) << ',' << fmt17(err) << '\n';

    if (!opt.dump_integrand.empty()) {
      std::ostringstream dump;
      owpn::immse::write_integrand_csv(dump, a, b);
      write_output(dump.str(), opt.dump_integrand);
    }
  }

  if (opt.pretty) {
    if (!opt.out_path.empty()) write_output(csv.str(), opt.out_path);
    std::cout << pts.size() << " points, worst cross-check error " << fmt17(worst)
              << (worst <= opt.tol ? " <= " : " > ") << fmt17(opt.tol) << '\n';
  } else {
    write_output(csv.str(), opt.out_path);
  }
  if (worst > opt.tol) {
    std::cerr << "cross-check error " << fmt17(worst) << " exceeds tolerance " << fmt17(opt.tol)
              << '\n';
    return 2;
  }
  return 0;
}

// ------------------------------------------------------------- simulate ----

struct SimulateOptions {
  double power = 1.0;
  double sigma2 = 1.0;
  double oversampling = 1.0;
  double alpha = -1.0;  // >= 0: derive L = max(1, floor(P^alpha))
  std::size_t blocks = 100000;
  std::uint64_t seed = 0;
  std::size_t bins_amplitude = 32;
  std::size_t bins_phase = 32;
  double amplitude_shift = 0.0;
  double amplitude_scale = -1.0;
  std::string dump_trajectory;
  std::string out_path;
  bool pretty = false;
};

owpn::ChannelParams simulate_params(const SimulateOptions& opt) {
  owpn::ChannelParams params;
  params.power = opt.power;
  params.sigma2 = opt.sigma2;
  params.oversampling = opt.alpha >= 0.0
                            ? static_cast<double>(owpn::oversampling_for(opt.power, opt.alpha))
                            : opt.oversampling;
  return params;
}

int cmd_simulate_stats(const SimulateOptions& opt) {
  const owpn::ChannelParams params = simulate_params(opt);
  const auto checks = owpn::experiments::run_moment_checks(params, opt.blocks, opt.seed);

  // Gates per metric: mean checks at 3 SE, the block-norm moment at 4 SE
  // (heavier-tailed statistic).
  const auto threshold = [](const std::string& metric) {
    return metric == "block_norm_sq" ? 4.0 : 3.0;
  };

  std::ostringstream csv;
  csv << "metric,n,sample,expected,se,z\n";
  bool failed = false;
  std::ostringstream human;
  for (const auto& check : checks) {
    csv << check.metric << ',' << check.n << ',' << fmt17(check.sample) << ','
        << fmt17(check.expected) << ',' << fmt17(check.se) << ',' << fmt17(check.z) << '\n';
    const bool ok = std::fabs(check.z) <= threshold(check.metric);
    failed |= !ok;
    human << check.metric << ": sample=" << fmt17(check.sample)
          << " expected=" << fmt17(check.expected) << " z=" << fmt17(check.z)
          << (ok ? " [ok]" : " [FAIL]") << '\n';
  }

  if (!opt.dump_trajectory.empty()) {
    // Re-generate a small prefix of the same trajectory/samples for plotting.
    const std::size_t dump_blocks = std::min<std::size_t>(opt.blocks, 1000);
    const auto traj = owpn::channel::sample_phase(params, dump_blocks, {opt.seed, 1});
    const owpn::channel::cplx x{std::sqrt(params.per_sample_power()), 0.0};
    const std::vector<owpn::channel::cplx> xs(dump_blocks, x);
    const auto blocks = owpn::channel::transmit(params, xs, traj, {opt.seed, 2});
    std::vector<owpn::channel::cplx> flat;
    flat.reserve(traj.theta.size());
    for (const auto& block : blocks)
      for (const auto& y : block.y) flat.push_back(y);
    std::ostringstream dump;
    owpn::channel::write_trajectory_csv(dump, traj, flat);
    write_output(dump.str(), opt.dump_trajectory);
  }

  if (opt.pretty) {
    if (!opt.out_path.empty()) write_output(csv.str(), opt.out_path);
    std::cout << human.str();
  } else {
    write_output(csv.str(), opt.out_path);
  }
  if (failed) {
    std::cerr << "moment check outside the z gate\n";
    return 2;
  }
  return 0;
}

int cmd_simulate_rate(const SimulateOptions& opt) {
  const owpn::ChannelParams params = simulate_params(opt);
  owpn::achievability::SchemeConfig config;
  config.n_blocks = opt.blocks;
  config.seed = opt.seed;
  config.bins_amplitude = opt.bins_amplitude;
  config.bins_phase = opt.bins_phase;
  config.amplitude_shift = opt.amplitude_shift;
  config.amplitude_scale = opt.amplitude_scale;

  const auto result = owpn::achievability::run_experiment(params, config);

  std::ostringstream csv;
  csv << "P,sigma2,L,n_blocks,seed,rate_amp_est,rate_phase_est,rate_total_est,outer_bound\n"
      << fmt17(params.power) << ',' << fmt17(params.sigma2) << ',' << fmt17(params.oversampling)
      << ',' << result.n_blocks << ',' << result.seed << ',' << fmt17(result.rate.amplitude_nats)
      << ',' << fmt17(result.rate.phase_nats) << ',' << fmt17(result.rate.total_nats) << ','
      << fmt17(result.outer_bound_nats) << '\n';

  const bool ok = result.rate.total_nats <= result.outer_bound_nats;
  if (opt.pretty) {
    if (!opt.out_path.empty()) write_output(csv.str(), opt.out_path);
    std::cout << "rate_total " << fmt17(result.rate.total_nats) << " nats "
              << (ok ? "<=" : ">") << " outer bound " << fmt17(result.outer_bound_nats)
              << " nats" << (ok ? " [ok]" : " [FAIL]") << '\n';
  } else {
    write_output(csv.str(), opt.out_path);
  }
  if (!ok) {
    std::cerr << "achievability estimate exceeds the outer bound\n";
    return 2;
  }
  return 0;
}

void add_config(CLI::App* cmd) {
  // Documents the flag and consumes its token; the file itself is expanded
  // into argv up front by expand_config_args. (CLI11 applies set_config
  // files only at the root app, so a subcommand-level set_config would
  // silently read nothing.)
  cmd->add_option("--config", "Read flags from a key = value file");
}

std::string trimmed(const std::string& s) {
  const char* ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

// Splices the contents of a --config file into the argument list as
// "--key=value" tokens, right where the flag appeared so they land in the
// same subcommand scope. Keys the command line already sets are skipped,
// which is what makes explicit flags win; unknown keys become ordinary
// unexpected-argument errors downstream.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  std::size_t insert_at = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      insert_at = i + 2;
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      insert_at = i + 1;
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) {
    throw owpn::validation_error("bad_config", "cannot read config file: " + path);
  }

  const auto already_given = [&args](const std::string& key) {
    const std::string canon = "--" + key;
    const char* alias = key == "power" ? "-P" : key == "oversampling" ? "-L" : nullptr;
    for (const auto& arg : args) {
      if (arg == canon || arg.rfind(canon + "=", 0) == 0) return true;
      if (alias != nullptr && arg.rfind(alias, 0) == 0) return true;
    }
    return false;
  };

  std::vector<std::string> injected;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string entry = trimmed(line);
    if (entry.empty() || entry[0] == '#' || entry[0] == ';') continue;
    const auto eq = entry.find('=');
    const std::string key = eq == std::string::npos ? "" : trimmed(entry.substr(0, eq));
    if (key.empty()) {
      throw owpn::validation_error("bad_config", "expected key = value on line " +
                                                     std::to_string(lineno) + " of " + path);
    }
    if (key == "config") {
      throw owpn::validation_error("bad_config", "config files cannot nest (line " +
                                                     std::to_string(lineno) + ")");
    }
    std::string value = trimmed(entry.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (!already_given(key)) injected.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), injected.begin(),
              injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiener phase-noise channel laboratory: capacity bounds, "
               "I-MMSE verification, GDoF slopes, Monte Carlo simulation"};
  app.require_subcommand(1);

  int rc = 0;

  // ---- bound ----
  BoundOptions bound_opt;
  CLI::App* bound = app.add_subcommand("bound", "Closed-form capacity bounds");
  bound->require_subcommand(1);

  const auto add_bound_flags = [&](CLI::App* cmd, bool sweep) {
    cmd->add_option("--bound", bound_opt.bounds,
                    "Bound name: wpn_th1, owpn_old_th3, owpn_new_th4, amplitude, phase")
        ->required();
    auto* p = cmd->add_option("--power,-P", bound_opt.powers, "Average power P");
    cmd->add_option("--sigma2", bound_opt.sigma2s, "Phase-noise variance per symbol")
        ->capture_default_str();
    auto* l = cmd->add_option("--oversampling,-L", bound_opt.oversamplings,
                              "Receiver samples per symbol");
    auto* a = cmd->add_option("--alpha", bound_opt.alphas,
                              "Oversampling exponent; sets L = max(1, floor(P^alpha))");
    l->excludes(a);
    a->excludes(l);
    cmd->add_option("--units", bound_opt.units, "Reporting units: bits or nats")
        ->capture_default_str();
    cmd->add_option("--o1", bound_opt.o1_nats, "O(1) constant (nats) added to owpn_old_th3")
        ->capture_default_str();
    cmd->add_option("--out", bound_opt.out_path, "Write CSV here instead of stdout");
    cmd->add_flag("--pretty", bound_opt.pretty, "Human-readable output");
    add_config(cmd);
    if (sweep) {
      auto* ps = cmd->add_option("--power-start", bound_opt.power_start,
                                 "Log-spaced P grid: start");
      cmd->add_option("--power-stop", bound_opt.power_stop, "Log-spaced P grid: stop");
      cmd->add_option("--power-points", bound_opt.power_points, "Log-spaced P grid: points");
      p->excludes(ps);
    } else {
      p->required();
    }
  };

  CLI::App* bound_eval = bound->add_subcommand("eval", "Evaluate one bound at one point");
  add_bound_flags(bound_eval, false);
  bound_eval->callback([&] { rc = cmd_bound_eval(bound_opt); });

  CLI::App* bound_sweep = bound->add_subcommand("sweep", "Evaluate bounds over a grid");
  add_bound_flags(bound_sweep, true);
  bound_sweep->callback([&] { rc = cmd_bound_sweep(bound_opt); });

  // ---- gdof ----
  GdofOptions gdof_opt;
  CLI::App* gdof = app.add_subcommand("gdof", "Empirical pre-log slopes vs the exact GDoF curve");
  gdof->add_option("--alpha", gdof_opt.alphas, "Oversampling exponents to fit")->required();
  gdof->add_option("--bound", gdof_opt.bound,
                   "Bound family to regress: owpn_new_th4, owpn_old_th3, amplitude, phase")
      ->capture_default_str();
  gdof->add_option("--sigma2", gdof_opt.sigma2, "Phase-noise variance per symbol")
      ->capture_default_str();
  gdof->add_option("--power-start", gdof_opt.power_start, "P grid start")->capture_default_str();
  gdof->add_option("--power-stop", gdof_opt.power_stop, "P grid stop")->capture_default_str();
  gdof->add_option("--power-points", gdof_opt.power_points, "P grid points")
      ->capture_default_str();
  gdof->add_option("--tol", gdof_opt.tol,
                   "Exit 2 if any |slope - target| exceeds this (0 = report only)")
      ->capture_default_str();
  gdof->add_option("--out", gdof_opt.out_path, "Write CSV here instead of stdout");
  gdof->add_flag("--pretty", gdof_opt.pretty, "Human-readable summary");
  add_config(gdof);
  gdof->callback([&] { rc = cmd_gdof(gdof_opt); });

  // ---- immse ----
  ImmseOptions immse_opt;
  CLI::App* immse = app.add_subcommand("immse", "Fisher/I-MMSE proof machinery");
  immse->require_subcommand(1);
  CLI::App* immse_verify = immse->add_subcommand(
      "verify", "Cross-check recursion fixed point, c identity and quadrature");
  immse_verify->add_option("--grid-min", immse_opt.grid_min, "a,b grid minimum")
      ->capture_default_str();
  immse_verify->add_option("--grid-max", immse_opt.grid_max, "a,b grid maximum")
      ->capture_default_str();
  immse_verify->add_option("--grid-points", immse_opt.grid_points, "points per axis")
      ->capture_default_str();
  immse_verify->add_option("--a", immse_opt.a_values, "Explicit a (with --b; single point)");
  immse_verify->add_option("--b", immse_opt.b_values, "Explicit b (with --a; single point)");
  auto* ip = immse_verify->add_option("--power,-P", immse_opt.power,
                                      "Derive (a, b) from a channel point instead");
  immse_verify->add_option("--sigma2", immse_opt.sigma2, "with --power");
  immse_verify->add_option("--oversampling,-L", immse_opt.oversampling, "with --power")
      ->capture_default_str();
  immse_verify->add_option("--tol", immse_opt.tol, "Largest tolerated cross-check error")
      ->capture_default_str();
  immse_verify->add_option("--perturb", immse_opt.perturb,
                           "Test hook: offset added to the quadrature integral");
  immse_verify->add_option("--dump-integrand", immse_opt.dump_integrand,
                           "Write integrand samples (single point only)");
  immse_verify->add_option("--out", immse_opt.out_path, "Write CSV here instead of stdout");
  immse_verify->add_flag("--pretty", immse_opt.pretty, "Human-readable verdict");
  add_config(immse_verify);
  immse_verify->callback([&] {
    immse_opt.have_params = ip->count() > 0;
    rc = cmd_immse_verify(immse_opt);
  });

  // ---- simulate ----
  SimulateOptions sim_opt;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo channel runs");
  simulate->require_subcommand(1);

  const auto add_sim_flags = [&](CLI::App* cmd) {
    cmd->add_option("--power,-P", sim_opt.power, "Average power P")->required();
    cmd->add_option("--sigma2", sim_opt.sigma2, "Phase-noise variance per symbol")
        ->capture_default_str();
    auto* l = cmd->add_option("--oversampling,-L", sim_opt.oversampling,
                              "Receiver samples per symbol (integer)");
    auto* a = cmd->add_option("--alpha", sim_opt.alpha,
                              "Oversampling exponent; sets L = max(1, floor(P^alpha))");
    l->excludes(a);
    a->excludes(l);
    cmd->add_option("--blocks", sim_opt.blocks, "Number of symbol blocks")
        ->capture_default_str();
    cmd->add_option("--seed", sim_opt.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--out", sim_opt.out_path, "Write CSV here instead of stdout");
    cmd->add_flag("--pretty", sim_opt.pretty, "Human-readable output");
    add_config(cmd);
  };

  CLI::App* sim_stats = simulate->add_subcommand("stats", "Channel moment checks vs theory");
  add_sim_flags(sim_stats);
  sim_stats->add_option("--dump-trajectory", sim_opt.dump_trajectory,
                        "Write a phase/sample trajectory CSV (first 1000 blocks)");
  sim_stats->callback([&] { rc = cmd_simulate_stats(sim_opt); });

  CLI::App* sim_rate = simulate->add_subcommand("rate", "Plug-in achievable-rate estimate");
  add_sim_flags(sim_rate);
  sim_rate->add_option("--bins-amplitude", sim_opt.bins_amplitude, "Quantile bins for (A, r)")
      ->capture_default_str();
  sim_rate->add_option("--bins-phase", sim_opt.bins_phase, "Quantile bins for (Phi, phi)")
      ->capture_default_str();
  sim_rate->add_option("--amplitude-shift", sim_opt.amplitude_shift,
                       "Shift s of the amplitude law A^2 = s + Exp(scale)")
      ->capture_default_str();
  sim_rate->add_option("--amplitude-scale", sim_opt.amplitude_scale,
                       "Scale of the exponential part (negative = rest of budget)");
  sim_rate->callback([&] { rc = cmd_simulate_rate(sim_opt); });

  try {
    auto args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11's vector overload wants reversed args
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help goes to stdout, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const owpn::validation_error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
    return 1;
  } catch (const owpn::numeric_error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
