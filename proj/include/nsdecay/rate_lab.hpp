#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsdecay/catalog.hpp"
#include "nsdecay/core_model.hpp"
#include "nsdecay/norm_engine.hpp"

namespace nsdecay {

struct TimeGrid {
  double t0 = 1e2;
  double t1 = 1e6;
  int count = 25;
  bool operator==(const TimeGrid&) const = default;
};

/// Log-uniform times t0, ..., t1 (count >= 2, 1 < t0 < t1).
std::vector<double> geometric_time_grid(double t0, double t1, int count);

struct PowerFit {
  double exponent = 0.0;
  double intercept = 0.0;  // ln prefactor
  double residual = 0.0;   // max |ln value - fitted line|
};

/// Least-squares line through (ln t, ln value) on the tail half of the samples.
PowerFit fit_power(std::span<const double> times, std::span<const double> values);

struct PlateauFit {
  double mean = 0.0;
  double drift = 0.0;  // (max - min) / mean
};

/// Statistics of value / sqrt(ln t) over the tail half.
PlateauFit fit_sqrt_log(std::span<const double> times, std::span<const double> values);

/// Index of the first sample in the tail half.
std::size_t tail_begin(std::size_t count);

/// Lower-bound ratio kappa(t) = value / (envelope(t) * scale) over the tail half.
struct KappaCheck {
  double scale = 0.0;        // b0 or b1
  double kappa_min = 0.0;
  double trend = 0.0;        // log-log slope of kappa over the tail
  bool passed = false;
};

struct RateReport {
  std::string tag;       // prop31 / thm1 / thm2 / sweep
  std::string name;      // e.g. growth, refined
  std::vector<double> times;
  std::vector<double> values;
  Envelope envelope;
  bool plateau = false;  // sqrt(ln t) statistics instead of a power fit
  PowerFit fit;
  PlateauFit plateau_fit;
  double target = 0.0;     // target exponent (power) or unused (plateau)
  double tolerance = 0.0;  // exponent band or maximal drift
  double ratio_min = 0.0, ratio_max = 0.0;
  std::optional<KappaCheck> kappa;

  bool rate_passed() const;
  bool passed() const;
  std::string summary() const;
};

/// Builds a report from measured values: fits, ratio band and optional kappa check.
RateReport make_report(std::string tag, std::string name, std::vector<double> times, std::vector<double> values,
                       Envelope env, double target, double tolerance, std::optional<double> kappa_scale = {});

void write_report_csv(std::ostream& os, const RateReport& r);

/// Minimum kappa accepted by the lower-bound checks and the largest tolerated downward trend.
inline constexpr double kKappaFloor = 0.01;
inline constexpr double kKappaTrendFloor = -0.05;

struct Prop31Options {
  double c0 = 1.0, c1 = 1.0, c2 = 1.0;
  double eps0 = 1.0;  // interior zone radius
  bool operator==(const Prop31Options&) const = default;
};

/// Norms of the sine multiplier sin(c1 r t) e^{-c2 r^2 t}/r and of the cosine difference
/// (e^{-c0 r^2 t} - cos(c1 r t) e^{-c2 r^2 t})/r over |xi| <= eps0, against D_n(t).
std::pair<RateReport, RateReport> run_prop31(int n, const Prop31Options& opt, const TimeGrid& grid,
                                             const QuadratureSpec& spec = {});

struct TheoremReports {
  RateReport main;     // growth (thm1) or decay (thm2)
  RateReport refined;  // profile-subtracted error
};

/// Heat-subtracted growth against D_n with kappa vs D_n b0, and the first-order refined error.
TheoremReports run_theorem1(const FluidParams& p, const InitialDatum& d, const TimeGrid& grid,
                            const QuadratureSpec& spec = {});

/// Raw decay of (rho, v) against t^{-n/4} with kappa vs t^{-n/4} b1, and the second-order refined error.
TheoremReports run_theorem2(const FluidParams& p, const InitialDatum& d, const TimeGrid& grid,
                            const QuadratureSpec& spec = {});

struct SweepEntry {
  double theta = 0.0;
  double b0 = 0.0;
  RateReport report;     // heat-subtracted pair with the regime's expected exponent
  double crossing_time;  // where theta * growth part overtakes the decaying part (NaN if none)
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  PowerFit growth_component;  // fit of the gaussian part alone
  PowerFit decay_component;   // fit of the monomial part alone
};

/// Family g_rho = theta * gaussian + monomial_gaussian(axis 0), g_v = 0, dot_H11 mode.
SweepResult run_threshold_sweep(const FluidParams& p, std::span<const double> thetas, const TimeGrid& grid,
                                const QuadratureSpec& spec = {}, double width = 1.0);

/// Runs fn(i) for i in [0, count) on worker threads; results are written by index, so the
/// outcome does not depend on scheduling. The first exception by index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace nsdecay
