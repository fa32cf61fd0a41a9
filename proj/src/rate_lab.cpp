#include "nsdecay/rate_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "nsdecay/errors.hpp"

namespace nsdecay {

namespace {

struct Line {
  double slope = 0.0, intercept = 0.0, residual = 0.0;
};

Line least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t m = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  Line l;
  l.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  l.intercept = my - l.slope * mx;
  for (std::size_t i = 0; i < m; ++i)
    l.residual = std::max(l.residual, std::abs(y[i] - (l.intercept + l.slope * x[i])));
  return l;
}

void check_samples(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw PreconditionError("times and values must have equal length");
  if (times.size() < 2) throw PreconditionError("a rate fit needs at least two samples");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw PreconditionError("fit times must be positive");
    if (!(values[i] > 0.0)) throw PreconditionError("fit values must be positive");
  }
}

void check_report_grid(const TimeGrid& g) {
  if (g.count < 10) throw PreconditionError("rate experiments need at least 10 grid times");
  if (!(g.t0 > 1.0) || !(g.t1 >= 1e3 * g.t0)) throw PreconditionError("rate experiments need 1 < t0 and t1 >= 1e3 t0");
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace

std::vector<double> geometric_time_grid(double t0, double t1, int count) {
  if (!(t0 > 1.0)) throw PreconditionError("time grid needs t0 > 1");
  if (!(t1 > t0)) throw PreconditionError("time grid needs t1 > t0");
  if (count < 2) throw PreconditionError("time grid needs at least two points");
  std::vector<double> t(count);
  const double ratio = t1 / t0;
  for (int i = 0; i < count; ++i) t[i] = t0 * std::pow(ratio, static_cast<double>(i) / (count - 1));
  t.front() = t0;
  t.back() = t1;
  return t;
}

std::size_t tail_begin(std::size_t count) { return count / 2; }

PowerFit fit_power(std::span<const double> times, std::span<const double> values) {
  check_samples(times, values);
  const std::size_t b = std::min(tail_begin(times.size()), times.size() - 2);
  std::vector<double> x, y;
  for (std::size_t i = b; i < times.size(); ++i) {
    x.push_back(std::log(times[i]));
    y.push_back(std::log(values[i]));
  }
  const Line l = least_squares(x, y);
  return {l.slope, l.intercept, l.residual};
}

PlateauFit fit_sqrt_log(std::span<const double> times, std::span<const double> values) {
  check_samples(times, values);
  for (double t : times)
    if (!(t > std::numbers::e)) throw PreconditionError("sqrt-log plateau needs times > e");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  std::size_t m = 0;
  for (std::size_t i = tail_begin(times.size()); i < times.size(); ++i) {
    const double q = values[i] / std::sqrt(std::log(times[i]));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    sum += q;
    ++m;
  }
  const double mean = sum / static_cast<double>(m);
  return {mean, (hi - lo) / mean};
}

bool RateReport::rate_passed() const {
  if (plateau) return plateau_fit.drift < tolerance;
  return std::abs(fit.exponent - target) <= tolerance;
}

bool RateReport::passed() const { return rate_passed() && (!kappa || kappa->passed); }

std::string RateReport::summary() const {
  std::ostringstream os;
  os << '[' << tag << "] " << name << ": ";
  if (plateau) {
    os << "envelope=" << envelope.label() << " drift<" << fmt("%g", tolerance)
       << " measured drift=" << fmt("%.4g", plateau_fit.drift) << " mean=" << fmt("%.6g", plateau_fit.mean);
  } else {
    os << "exponent=" << fmt("%g", target) << "±" << fmt("%g", tolerance)
       << " measured=" << fmt("%.5f", fit.exponent) << " residual=" << fmt("%.3g", fit.residual);
  }
  os << " ratio=[" << fmt("%.6g", ratio_min) << ", " << fmt("%.6g", ratio_max) << "]";
  if (kappa)
    os << " kappa_min=" << fmt("%.4g", kappa->kappa_min) << " kappa_trend=" << fmt("%.4f", kappa->trend);
  os << (passed() ? " PASS" : " FAIL");
  return os.str();
}

RateReport make_report(std::string tag, std::string name, std::vector<double> times, std::vector<double> values,
                       Envelope env, double target, double tolerance, std::optional<double> kappa_scale) {
  check_samples(times, values);
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw PreconditionError("report times must be strictly increasing");
  RateReport r;
  r.tag = std::move(tag);
  r.name = std::move(name);
  r.envelope = env;
  r.plateau = env.kind == EnvelopeKind::sqrt_log_t;
  r.target = target;
  r.tolerance = tolerance;
  r.fit = fit_power(times, values);
  if (r.plateau) r.plateau_fit = fit_sqrt_log(times, values);

  const std::size_t b = tail_begin(times.size());
  r.ratio_min = std::numeric_limits<double>::infinity();
  r.ratio_max = -r.ratio_min;
  std::vector<double> lt, lk;
  for (std::size_t i = b; i < times.size(); ++i) {
    const double q = values[i] / env(times[i]);
    r.ratio_min = std::min(r.ratio_min, q);
    r.ratio_max = std::max(r.ratio_max, q);
    if (kappa_scale) {
      lt.push_back(std::log(times[i]));
      lk.push_back(std::log(q / *kappa_scale));
    }
  }
  if (kappa_scale) {
    if (!(*kappa_scale > 0.0)) throw PreconditionError("kappa scale must be positive");
    KappaCheck k;
    k.scale = *kappa_scale;
    k.kappa_min = r.ratio_min / *kappa_scale;
    k.trend = least_squares(lt, lk).slope;
    k.passed = k.kappa_min >= kKappaFloor && k.trend >= kKappaTrendFloor;
    r.kappa = k;
  }
  r.times = std::move(times);
  r.values = std::move(values);
  return r;
}

void write_report_csv(std::ostream& os, const RateReport& r) { write_norm_table(os, r.times, r.values, r.envelope); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, count);
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::pair<RateReport, RateReport> run_prop31(int n, const Prop31Options& opt, const TimeGrid& grid,
                                             const QuadratureSpec& spec) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  if (!(opt.c0 > 0.0 && opt.c1 > 0.0 && opt.c2 > 0.0)) throw PreconditionError("c0, c1, c2 must be positive");
  if (!(opt.eps0 > 0.0)) throw PreconditionError("eps0 must be positive");
  check_report_grid(grid);
  const auto times = geometric_time_grid(grid.t0, grid.t1, grid.count);
  std::vector<double> sine(times.size()), cosdiff(times.size());

  parallel_for(times.size(), [&](std::size_t i) {
    const double t = times[i];
    QuadratureSpec s = spec;
    const double cut = std::sqrt(37.0 / (std::min(opt.c0, opt.c2) * t));
    s.r_max = std::min(opt.eps0, spec.r_max > 0.0 ? std::min(spec.r_max, cut) : cut);
    const RadialHints hints{opt.c1 * t, std::min(opt.c0, opt.c2) * t};
    sine[i] = l2_norm_radial(
        [&](double r) { return cplx(std::sin(opt.c1 * r * t) * std::exp(-opt.c2 * r * r * t) / r); }, n, s, hints);
    cosdiff[i] = l2_norm_radial(
        [&](double r) {
          // e^{-c0 x} - cos(c1 r t) e^{-c2 x} = e^{-c2 x} ((e^{(c2-c0) x} - 1) + 2 sin^2(c1 r t / 2))
          const double x = r * r * t;
          const double sh = std::sin(0.5 * opt.c1 * r * t);
          return cplx(std::exp(-opt.c2 * x) * (std::expm1((opt.c2 - opt.c0) * x) + 2.0 * sh * sh) / r);
        },
        n, s, hints);
  });

  const Envelope env = Envelope::growth(n);
  const double target = env.exponent;
  const double tol = n == 2 ? 0.2 : 0.05;
  return {make_report("prop31", "sine", times, sine, env, target, tol),
          make_report("prop31", "cosine_difference", times, cosdiff, env, target, tol)};
}

TheoremReports run_theorem1(const FluidParams& p, const InitialDatum& d, const TimeGrid& grid,
                            const QuadratureSpec& spec) {
  p.validate();
  if (d.dim() != p.n) throw PreconditionError("datum and parameters must share the dimension");
  if (d.mode() != DatumMode::dot_H11) throw PreconditionError("thm1 needs a dot_H11 datum");
  if (d.b0_vanishes()) throw PreconditionError("b0 = 0: use thm2");
  check_report_grid(grid);
  const auto times = geometric_time_grid(grid.t0, grid.t1, grid.count);
  std::vector<double> growth(times.size()), refined(times.size());
  const Quantity which[] = {Quantity::rho_minus_heat, Quantity::v_minus_heat, Quantity::rho_minus_heat_minus_profile,
                            Quantity::v_minus_heat_minus_profile};
  const FrequencyWindow window = FrequencyWindow::defaults(p);
  parallel_for(times.size(), [&](std::size_t i) {
    const auto v = solution_norms(p, d, times[i], which, spec, window);
    growth[i] = std::hypot(v[0], v[1]);
    refined[i] = std::hypot(v[2], v[3]);
  });
  const int n = p.n;
  const double b0 = d.thresholds().b0;
  return {make_report("thm1", "growth", times, growth, Envelope::growth(n), Envelope::growth(n).exponent, n == 2 ? 0.2 : 0.05, b0),
          make_report("thm1", "refined", times, refined, Envelope::power_law(-0.25 * n), -0.25 * n, 0.1)};
}

TheoremReports run_theorem2(const FluidParams& p, const InitialDatum& d, const TimeGrid& grid,
                            const QuadratureSpec& spec) {
  p.validate();
  if (d.dim() != p.n) throw PreconditionError("datum and parameters must share the dimension");
  if (d.mode() != DatumMode::dot_H11) throw PreconditionError("thm2 needs a dot_H11 datum");
  if (!d.b0_vanishes()) throw PreconditionError("b0 > 0: use thm1");
  const double b1 = d.thresholds().b1;
  if (!(b1 > d.b0_gate())) throw PreconditionError("b1 = 0: the first moments vanish");
  check_report_grid(grid);
  const auto times = geometric_time_grid(grid.t0, grid.t1, grid.count);
  std::vector<double> decay(times.size()), refined(times.size());
  const Quantity which[] = {Quantity::pair, Quantity::rho_minus_profile2, Quantity::v_minus_profile2};
  const FrequencyWindow window = FrequencyWindow::defaults(p);
  parallel_for(times.size(), [&](std::size_t i) {
    const auto v = solution_norms(p, d, times[i], which, spec, window);
    decay[i] = v[0];
    refined[i] = std::hypot(v[1], v[2]);
  });
  const double n = p.n;
  return {make_report("thm2", "decay", times, decay, Envelope::power_law(-0.25 * n), -0.25 * n, 0.05, b1),
          make_report("thm2", "refined", times, refined, Envelope::power_law(-0.5 - 0.25 * n), -0.5 - 0.25 * n, 0.1)};
}

SweepResult run_threshold_sweep(const FluidParams& p, std::span<const double> thetas, const TimeGrid& grid,
                                const QuadratureSpec& spec, double width) {
  p.validate();
  if (thetas.empty()) throw PreconditionError("sweep needs at least one theta");
  for (double th : thetas)
    if (!(th >= 0.0)) throw PreconditionError("sweep theta must be >= 0");
  check_report_grid(grid);
  const int n = p.n;
  const auto times = geometric_time_grid(grid.t0, grid.t1, grid.count);
  const FrequencyWindow window = FrequencyWindow::defaults(p);
  const Quantity which[] = {Quantity::rho_minus_heat, Quantity::v_minus_heat};
  const Generator gauss = make_gaussian(n, width, 1.0);
  const Generator mono = make_monomial_gaussian(n, 0, width, 1.0);
  const std::vector<Generator> zero_v(n, make_zero(n));

  auto measure = [&](const InitialDatum& d) {
    std::vector<double> out(times.size());
    parallel_for(times.size(), [&](std::size_t i) {
      const auto v = solution_norms(p, d, times[i], which, spec, window);
      out[i] = std::hypot(v[0], v[1]);
    });
    return out;
  };

  SweepResult res;
  res.growth_component = fit_power(times, measure(build_datum(DatumMode::dot_H11, gauss, zero_v)));
  res.decay_component = fit_power(times, measure(build_datum(DatumMode::dot_H11, mono, zero_v)));

  for (double th : thetas) {
    const double coeffs[] = {th, 1.0};
    const Generator parts[] = {gauss, mono};
    const InitialDatum d = build_datum(DatumMode::dot_H11, combine(coeffs, parts), zero_v);
    SweepEntry e;
    e.theta = th;
    e.b0 = d.thresholds().b0;
    const bool growth = !d.b0_vanishes();
    const Envelope env = growth ? Envelope::growth(n) : Envelope::power_law(-0.25 * n);
    const double target = growth ? Envelope::growth(n).exponent : -0.25 * n;
    const double tol = growth && n == 2 ? 0.2 : 0.05;
    e.report = make_report("sweep", "theta=" + fmt("%g", th), times, measure(d), env, target, tol);

    e.crossing_time = std::numeric_limits<double>::quiet_NaN();
    if (th > 0.0) {
      const PowerFit& g = res.growth_component;
      const PowerFit& m = res.decay_component;
      auto gap = [&](double s) { return std::log(th) + g.intercept + g.exponent * s - (m.intercept + m.exponent * s); };
      double a = std::log(1e-3), b = std::log(1e12);
      if (gap(a) * gap(b) < 0.0) {
        for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
          const double c = 0.5 * (a + b);
          (gap(a) * gap(c) <= 0.0 ? b : a) = c;
        }
        e.crossing_time = std::exp(0.5 * (a + b));
      }
    }
    res.entries.push_back(std::move(e));
  }
  return res;
}

}  // namespace nsdecay
