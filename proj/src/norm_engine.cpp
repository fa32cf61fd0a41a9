#include "nsdecay/norm_engine.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "nsdecay/errors.hpp"

namespace nsdecay {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-37) < 1e-16
constexpr double kCutExponent = 37.0;
constexpr int kMinPanels = 64;

struct PanelRule {
  std::vector<double> x, w;  // on [-1, 1]
};

const PanelRule& panel_rule() {
  static const PanelRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 4>;
    PanelRule r;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      r.x.push_back(-a[i]);
      r.w.push_back(wt[i]);
      r.x.push_back(a[i]);
      r.w.push_back(wt[i]);
    }
    return r;
  }();
  return rule;
}

using ShellFn = std::function<void(double r, std::span<double> out)>;

/// Coarse panel boundaries on [lo, hi]: geometric grading away from lo > 0, then uniform.
std::vector<double> coarse_breaks(double lo, double hi, double width) {
  std::vector<double> b{lo};
  double x = lo;
  if (lo > 0.0) {
    while (2.0 * x < lo + width && 2.0 * x < hi) {
      x *= 2.0;
      b.push_back(x);
    }
  }
  const double rest = hi - x;
  if (rest > 0.0) {
    const auto count = static_cast<long>(std::ceil(rest / width - 1e-12));
    const long m = std::max<long>(1, count);
    for (long k = 1; k < m; ++k) b.push_back(x + rest * static_cast<double>(k) / static_cast<double>(m));
    b.push_back(hi);
  }
  return b;
}

std::vector<double> integrate_level(const ShellFn& shell, int channels, int n, const std::vector<double>& breaks,
                                    int level) {
  const PanelRule& rule = panel_rule();
  const long split = 1L << level;
  std::vector<CompensatedSum> acc(channels);
  std::vector<double> tmp(channels);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p];
    const double step = (breaks[p + 1] - a) / static_cast<double>(split);
    for (long s = 0; s < split; ++s) {
      const double lo = a + step * static_cast<double>(s);
      const double mid = lo + 0.5 * step;
      const double half = 0.5 * step;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double r = mid + half * rule.x[i];
        const double wr = half * rule.w[i] * std::pow(r, n - 1);
        std::fill(tmp.begin(), tmp.end(), 0.0);
        shell(r, tmp);
        for (int c = 0; c < channels; ++c) acc[c].add(wr * tmp[c]);
      }
    }
  }
  std::vector<double> out(channels);
  for (int c = 0; c < channels; ++c) out[c] = acc[c].value();
  return out;
}

/// Integral of the angular-summed squared channels times r^{n-1} over [lo, hi], refined
/// by panel doubling until two successive levels agree within rel_tol.
std::vector<double> integrate_radial(const ShellFn& shell, int channels, int checked, int n, double lo, double hi,
                                     double oscillation, const QuadratureSpec& spec) {
  if (!(hi > lo)) return std::vector<double>(channels, 0.0);
  double width = (hi - lo) / kMinPanels;
  if (oscillation > 0.0)
    width = std::min(width, std::numbers::pi / (2.0 * oscillation * spec.panels_per_halfperiod));
  // level 0 uses twice the admissible width; every accepted level meets the width bound
  const std::vector<double> breaks = coarse_breaks(lo, hi, 2.0 * width);

  std::vector<double> prev = integrate_level(shell, channels, n, breaks, 0);
  for (int level = 1; level <= spec.max_doublings; ++level) {
    std::vector<double> cur = integrate_level(shell, channels, n, breaks, level);
    double scale = 0.0;
    for (double v : cur) scale = std::max(scale, std::sqrt(std::abs(v)));
    bool ok = true;
    int worst = 0;
    double worst_gap = -1.0;
    for (int c = 0; c < checked; ++c) {
      const double a = std::sqrt(std::abs(prev[c]));
      const double b = std::sqrt(std::abs(cur[c]));
      const double gap = std::abs(a - b);
      if (gap > spec.rel_tol * std::max(a, b) + 1e-13 * scale) ok = false;
      if (gap > worst_gap) {
        worst_gap = gap;
        worst = c;
      }
    }
    if (ok) return cur;
    if (level == spec.max_doublings)
      throw QuadratureError("radial quadrature did not reach the self-convergence tolerance",
                            std::sqrt(std::abs(prev[worst])), std::sqrt(std::abs(cur[worst])));
    prev = std::move(cur);
  }
  return prev;
}

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

std::vector<std::pair<double, double>> window_pieces(const FrequencyWindow& w, double lo, double hi) {
  std::vector<std::pair<double, double>> zones;
  if (w.selector == Zone::all) {
    zones = {{0.0, w.eps0}, {w.eps0, w.n0}, {w.n0, kInf}};
  } else {
    zones = {w.radial_range()};
  }
  std::vector<std::pair<double, double>> out;
  for (auto [a, b] : zones) {
    const double x = std::max(a, lo), y = std::min(b, hi);
    out.emplace_back(x, std::max(x, y));
  }
  return out;
}

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

void QuadratureSpec::validate() const {
  if (!(r_min >= 0.0)) throw PreconditionError("r_min must be >= 0");
  if (!(r_max >= 0.0)) throw PreconditionError("r_max must be >= 0 (0 = automatic)");
  if (r_max > 0.0 && !(r_max > r_min)) throw PreconditionError("r_max must exceed r_min");
  if (panels_per_halfperiod < 4) throw PreconditionError("panels_per_halfperiod must be >= 4");
  if (circle_nodes < 64) throw PreconditionError("circle rule needs at least 64 nodes");
  if (sphere_degree < 20) throw PreconditionError("sphere rule needs degree >= 20");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw PreconditionError("rel_tol must lie in (0, 1)");
  if (max_doublings < 1 || max_doublings > 12) throw PreconditionError("max_doublings must lie in [1, 12]");
}

AngularRule AngularRule::for_dimension(int n, const QuadratureSpec& spec) {
  AngularRule rule;
  rule.n = n;
  if (n == 1) {
    rule.nodes = {-1.0, 1.0};
    rule.weights = {1.0, 1.0};
  } else if (n == 2) {
    const int m = spec.circle_nodes;
    for (int k = 0; k < m; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / m;
      rule.nodes.push_back(std::cos(phi));
      rule.nodes.push_back(std::sin(phi));
      rule.weights.push_back(2.0 * std::numbers::pi / m);
    }
  } else if (n == 3) {
    const int nmu = spec.sphere_degree / 2 + 1;
    const int nphi = spec.sphere_degree + 1;
    std::vector<double> mu, wmu;
    for (double z : boost::math::legendre_p_zeros<double>(nmu)) {
      const double d = boost::math::legendre_p_prime(nmu, z);
      const double w = 2.0 / ((1.0 - z * z) * d * d);
      mu.push_back(z);
      wmu.push_back(w);
      if (z != 0.0) {
        mu.push_back(-z);
        wmu.push_back(w);
      }
    }
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double sn = std::sqrt(std::max(0.0, 1.0 - mu[i] * mu[i]));
      for (int k = 0; k < nphi; ++k) {
        const double phi = 2.0 * std::numbers::pi * (k + 0.5) / nphi;
        rule.nodes.push_back(sn * std::cos(phi));
        rule.nodes.push_back(sn * std::sin(phi));
        rule.nodes.push_back(mu[i]);
        rule.weights.push_back(wmu[i] * 2.0 * std::numbers::pi / nphi);
      }
    }
  } else {
    throw PreconditionError("full angular quadrature supports n <= 3; use radial factorizations above");
  }
  return rule;
}

double SpectralField::auto_r_max() const {
  const RadialHints h = hints();
  if (!(h.diffusion > 0.0)) throw PreconditionError("field has no diffusive cutoff; set r_max explicitly");
  return std::sqrt(kCutExponent / h.diffusion);
}

FunctionField::FunctionField(int n, std::function<cplx(std::span<const double>)> f, RadialHints hints)
    : n_(n), f_(std::move(f)), hints_(hints), xi_(n) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
}

void FunctionField::eval_sq(double r, std::span<const double> omega, std::span<double> out) {
  for (int i = 0; i < n_; ++i) xi_[i] = r * omega[i];
  out[0] = std::norm(f_(xi_));
}

double l2_norm_radial(const std::function<cplx(double)>& m, int n, const QuadratureSpec& spec, RadialHints hints) {
  spec.validate();
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  double hi = spec.r_max;
  if (hi == 0.0) {
    if (!(hints.diffusion > 0.0)) throw PreconditionError("l2_norm_radial needs r_max or a diffusion hint");
    hi = std::sqrt(kCutExponent / hints.diffusion);
  }
  const double measure = sphere_measure(n);
  ShellFn shell = [&](double r, std::span<double> out) { out[0] = measure * std::norm(m(r)); };
  const auto v = integrate_radial(shell, 1, 1, n, spec.r_min, hi, hints.oscillation, spec);
  return std::sqrt(std::max(0.0, v[0]));
}

std::vector<double> l2_norm_field_channels(SpectralField& f, const QuadratureSpec& spec,
                                           const FrequencyWindow& window) {
  spec.validate();
  window.validate();
  const int n = f.dim();
  const AngularRule ang = AngularRule::for_dimension(n, spec);
  const int ch = f.channels();
  const double hi = spec.r_max > 0.0 ? spec.r_max : f.auto_r_max();
  if (!std::isfinite(hi)) throw PreconditionError("automatic cutoff is infinite; set r_max explicitly");
  const RadialHints hints = f.hints();

  std::vector<double> tmp(ch);
  ShellFn shell = [&](double r, std::span<double> out) {
    f.shell(r);
    for (std::size_t k = 0; k < ang.size(); ++k) {
      f.eval_sq(r, ang.node(k), tmp);
      for (int c = 0; c < ch; ++c) out[c] += ang.weights[k] * tmp[c];
    }
  };
  std::vector<double> total(ch, 0.0);
  for (auto [lo, up] : window_pieces(window, spec.r_min, hi)) {
    const auto part = integrate_radial(shell, ch, f.checked_channels(), n, lo, up, hints.oscillation, spec);
    for (int c = 0; c < ch; ++c) total[c] += part[c];
  }
  for (double& v : total) v = std::sqrt(std::max(0.0, v));
  return total;
}

double l2_norm_field(SpectralField& f, const QuadratureSpec& spec, const FrequencyWindow& window) {
  if (f.channels() != 1) throw PreconditionError("l2_norm_field expects a single-channel field");
  return l2_norm_field_channels(f, spec, window)[0];
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::rho: return "rho";
    case Quantity::v: return "v";
    case Quantity::pair: return "pair";
    case Quantity::rho_minus_heat: return "rho_minus_heat";
    case Quantity::v_minus_heat: return "v_minus_heat";
    case Quantity::rho_minus_heat_minus_profile: return "rho_minus_heat_minus_profile";
    case Quantity::v_minus_heat_minus_profile: return "v_minus_heat_minus_profile";
    case Quantity::rho_minus_profile2: return "rho_minus_profile2";
    case Quantity::v_minus_profile2: return "v_minus_profile2";
  }
  return "?";
}

SolutionField::SolutionField(const FluidParams& p, const InitialDatum& d, double t, std::vector<Quantity> which)
    : p_(p), d_(&d), t_(t) {
  p_.validate();
  if (d.dim() != p.n) throw PreconditionError("datum and parameters must share the dimension");
  if (!(t >= 0.0)) throw PreconditionError("time must be >= 0");
  for (Quantity q : which) {
    if (q == Quantity::pair) {
      for (Quantity b : {Quantity::rho, Quantity::v})
        if (std::find(base_.begin(), base_.end(), b) == base_.end()) base_.push_back(b);
    } else if (std::find(base_.begin(), base_.end(), q) == base_.end()) {
      base_.push_back(q);
    }
  }
  for (Quantity q : base_) {
    if (q == Quantity::rho_minus_heat_minus_profile || q == Quantity::v_minus_heat_minus_profile)
      need_profile1_ = true;
    if (q == Quantity::rho_minus_profile2 || q == Quantity::v_minus_profile2) need_profile2_ = true;
    if (q == Quantity::rho || q == Quantity::v || q == Quantity::rho_minus_profile2 || q == Quantity::v_minus_profile2)
      need_raw_ = true;
    else
      need_mh_ = true;
  }
  if (need_profile1_) {
    auto [a, b] = profile_first_order(d, p);
    prof1_rho_ = std::make_unique<ProfileField>(a);
    prof1_v_ = std::make_unique<ProfileField>(b);
  }
  if (need_profile2_) {
    auto [a, b] = profile_second_order(d, p);
    prof2_rho_ = std::make_unique<ProfileField>(a);
    prof2_v_ = std::make_unique<ProfileField>(b);
  }
  xi_.resize(p.n);
  gv_.resize(p.n);
  ptmp_.resize(p.n);
}

int SolutionField::channel_of(Quantity q) const {
  const auto it = std::find(base_.begin(), base_.end(), q);
  return it == base_.end() ? -1 : static_cast<int>(it - base_.begin());
}

bool SolutionField::raw_requested() const {
  return channel_of(Quantity::rho) >= 0 || channel_of(Quantity::v) >= 0;
}

RadialHints SolutionField::hints() const {
  double reach = 0.0;
  auto scan = [&](const Generator& g) {
    for (const auto& term : g.terms()) reach = std::max(reach, norm2(term.shift));
  };
  scan(d_->g_rho());
  for (const auto& g : d_->g_v()) scan(g);
  return {p_.gamma * t_ + reach, std::min(p_.alpha, p_.half_viscous()) * t_};
}

double SolutionField::auto_r_max() const {
  const double r_heat = t_ > 0.0 ? std::sqrt(kCutExponent / (std::min(p_.alpha, p_.half_viscous()) * t_)) : kInf;
  double r_datum = d_->spectral_radius();
  if (r_datum == 0.0) r_datum = std::min(1.0, r_heat);
  const bool profiles = need_profile1_ || need_profile2_;
  double r;
  if (p_.gamma * p_.gamma * t_ / p_.viscous_sum() >= kCutExponent)
    r = profiles ? r_heat : std::min(r_heat, r_datum);
  else
    r = profiles ? std::max(r_heat, r_datum) : r_datum;
  return r;
}

void SolutionField::shell(double r) {
  if (r == r_) return;
  r_ = r;
  ker_ = solution_kernels(p_, r, t_);
  have_k_ = ker_.roots.regime == Regime::oscillatory;
  if (have_k_) kf_ = k_family(p_, t_, ker_.roots, r);
  if (need_profile1_ || need_profile2_) jf_ = j_family(p_, t_, r);
}

void SolutionField::eval_sq(double r, std::span<const double> omega, std::span<double> out) {
  shell(r);
  const int n = p_.n;
  for (int i = 0; i < n; ++i) xi_[i] = r * omega[i];
  const bool dot = d_->mode() == DatumMode::dot_H11;

  const cplx g_rho = d_->g_rho().fourier(xi_);
  for (int k = 0; k < n; ++k) gv_[k] = d_->g_v()[k].fourier(xi_);
  // unscaled datum rho0^, v0^ and the |xi|-scaled versions
  const double to_raw = dot ? 1.0 / r : 1.0;
  const double to_scaled = dot ? 1.0 : r;
  const cplx rho0 = g_rho * to_raw;
  const cplx srho = g_rho * to_scaled;
  cplx wg = 0.0;  // omega . g_v^
  for (int k = 0; k < n; ++k) wg += omega[k] * gv_[k];
  const cplx wv0 = wg * to_raw;
  const cplx wsv = wg * to_scaled;

  const cplx A = ker_.A, E = ker_.E, C = ker_.C;
  const double Ha = ker_.heat_alpha, Hh = ker_.heat_half;
  const double g = p_.gamma;

  // the velocity lines share the direction omega except for the heat part of v0
  cplx rho_raw = 0.0, rho_mh = 0.0, coef_raw = 0.0, coef_mh = 0.0;
  if (need_raw_) {
    rho_raw = A * rho0 - kI * g * E * r * wv0;
    coef_raw = -kI * g * E * r * rho0 + (C - Ha) * wv0;
  }
  if (need_mh_) {
    if (have_k_) {
      rho_mh = kf_.k0 * srho - kI * kf_.k1 * wsv;
      coef_mh = -kI * kf_.k1 * srho + kf_.k2 * wsv;
    } else {
      rho_mh = (A - Hh) * rho0 - kI * g * E * r * wv0;
      coef_mh = -kI * g * E * r * rho0 + (C - Ha) * wv0;
    }
  }
  auto v_raw = [&](int m) { return Ha * gv_[m] * to_raw + coef_raw * omega[m]; };
  auto v_mh = [&](int m) { return coef_mh * omega[m]; };

  for (std::size_t c = 0; c < base_.size(); ++c) {
    double acc = 0.0;
    switch (base_[c]) {
      case Quantity::rho: acc = std::norm(rho_raw); break;
      case Quantity::v:
        for (int m = 0; m < n; ++m) acc += std::norm(v_raw(m));
        break;
      case Quantity::rho_minus_heat: acc = std::norm(rho_mh); break;
      case Quantity::v_minus_heat: acc = std::norm(coef_mh); break;
      case Quantity::rho_minus_heat_minus_profile:
        prof1_rho_->eval_with(jf_, Ha, Hh, r, omega, std::span<cplx>(ptmp_.data(), 1));
        acc = std::norm(rho_mh - ptmp_[0]);
        break;
      case Quantity::v_minus_heat_minus_profile:
        prof1_v_->eval_with(jf_, Ha, Hh, r, omega, ptmp_);
        for (int m = 0; m < n; ++m) acc += std::norm(v_mh(m) - ptmp_[m]);
        break;
      case Quantity::rho_minus_profile2:
        prof2_rho_->eval_with(jf_, Ha, Hh, r, omega, std::span<cplx>(ptmp_.data(), 1));
        acc = std::norm(rho_raw - ptmp_[0]);
        break;
      case Quantity::v_minus_profile2:
        prof2_v_->eval_with(jf_, Ha, Hh, r, omega, ptmp_);
        for (int m = 0; m < n; ++m) acc += std::norm(v_raw(m) - ptmp_[m]);
        break;
      case Quantity::pair: break;
    }
    out[c] = acc;
  }
  const double kernel = std::max({std::abs(A), std::abs(C), g * std::abs(E) * r, Ha, Hh});
  double datum = 0.0;
  for (double unit : {need_raw_ ? to_raw : 0.0, need_mh_ ? to_scaled : 0.0}) {
    datum += std::norm(g_rho * unit);
    for (int k = 0; k < n; ++k) datum += std::norm(gv_[k] * unit);
  }
  out[base_.size()] = kernel * kernel * datum;
}

std::vector<double> solution_norms(const FluidParams& p, const InitialDatum& d, double t,
                                   std::span<const Quantity> which, const QuadratureSpec& spec,
                                   const FrequencyWindow& window) {
  spec.validate();
  window.validate();
  p.validate();
  SolutionField field(p, d, t, {which.begin(), which.end()});
  const double lower =
      (window.selector == Zone::interior || window.selector == Zone::all) ? spec.r_min : std::max(spec.r_min, window.eps0);
  if (field.raw_requested() && d.mode() == DatumMode::dot_H11 && !d.b0_vanishes() && p.n <= 2 && lower == 0.0)
    throw DivergentAtOrigin(
        "raw L2 norm is infinite for a dot_H11 datum with b0 > 0 in n <= 2; use a heat-subtracted quantity or r_min > 0");

  const auto ch = l2_norm_field_channels(field, spec, window);
  const double phys = std::pow(2.0 * std::numbers::pi, -0.5 * p.n);
  std::vector<double> out;
  for (Quantity q : which) {
    if (q == Quantity::pair) {
      const double a = ch[field.channel_of(Quantity::rho)];
      const double b = ch[field.channel_of(Quantity::v)];
      out.push_back(phys * std::sqrt(a * a + b * b));
    } else {
      out.push_back(phys * ch[field.channel_of(q)]);
    }
  }
  return out;
}

double solution_norm(const FluidParams& p, const InitialDatum& d, double t, Quantity which,
                     const QuadratureSpec& spec, const FrequencyWindow& window) {
  const Quantity q[1] = {which};
  return solution_norms(p, d, t, q, spec, window)[0];
}

GridSnapshot synthesize_grid_field(const FluidParams& p, const InitialDatum& d, double t, double h, double R) {
  p.validate();
  const int n = p.n;
  if (n != 1 && n != 2) throw PreconditionError("snapshots support n = 1 and n = 2");
  if (d.dim() != n) throw PreconditionError("datum and parameters must share the dimension");
  if (!(t >= 0.0)) throw PreconditionError("time must be >= 0");
  if (!(h > 0.0) || !(R >= h)) throw PreconditionError("snapshot lattice needs h > 0 and R >= h");
  if (d.mode() == DatumMode::dot_H11 && !d.b0_vanishes())
    throw DivergentAtOrigin("snapshot of a dot_H11 datum with b0 > 0 has an infinite xi = 0 value");
  const long M = static_cast<long>(std::floor(R / h));
  const long side = 2 * M + 1;
  if ((n == 1 && side > 200001) || (n == 2 && side > 2001)) throw PreconditionError("snapshot lattice too large");

  GridSnapshot s;
  s.n = n;
  s.h = h;
  s.R = R;
  s.t = t;
  const double L = 2.0 * std::numbers::pi / h;
  for (long k = -M; k <= M; ++k) s.axis.push_back(static_cast<double>(k) * L / static_cast<double>(side));
  const double r_heat = t > 0.0 ? std::sqrt(kCutExponent / (std::min(p.alpha, p.half_viscous()) * t)) : kInf;
  if (R < std::min(r_heat, d.spectral_radius()))
    s.warnings.push_back("cutoff R is below the diffusive support radius; expect truncation error");

  const std::size_t total = n == 1 ? side : side * side;
  const int comps = 1 + n;
  std::vector<std::vector<cplx>> F(comps, std::vector<cplx>(total, 0.0));
  std::vector<double> xi(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const long j0 = n == 1 ? static_cast<long>(idx) - M : static_cast<long>(idx / side) - M;
    const long j1 = n == 1 ? 0 : static_cast<long>(idx % side) - M;
    xi[0] = static_cast<double>(j0) * h;
    if (n == 2) xi[1] = static_cast<double>(j1) * h;
    if (j0 == 0 && j1 == 0) {
      if (d.mode() == DatumMode::direct) {
        // the system at xi = 0 reduces to d/dt = 0
        F[0][idx] = d.g_rho().fourier(xi);
        for (int k = 0; k < n; ++k) F[1 + k][idx] = d.g_v()[k].fourier(xi);
      } else {
        s.warnings.push_back("xi = 0 lattice node excluded: the dot_H11 symbol has no continuous extension there");
      }
      continue;
    }
    const SpectralState st = solve(p, d, t, xi);
    F[0][idx] = st.rho_hat;
    for (int k = 0; k < n; ++k) F[1 + k][idx] = st.v_hat[k];
  }

  // e^{i x_a xi_j} table: x_a xi_j = a j h L / side = 2 pi a j / side
  std::vector<cplx> phase(side);
  for (long m = 0; m < side; ++m) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(side);
    phase[m] = {std::cos(ang), std::sin(ang)};
  }
  auto tw = [&](long a, long j) {
    long m = ((a * j) % side + side) % side;
    return phase[m];
  };
  const double norm = std::pow(h / (2.0 * std::numbers::pi), n);

  std::vector<std::vector<double>> phys(comps, std::vector<double>(total, 0.0));
  for (int c = 0; c < comps; ++c) {
    if (n == 1) {
      for (long a = -M; a <= M; ++a) {
        cplx acc = 0.0;
        for (long j = -M; j <= M; ++j) acc += F[c][j + M] * tw(a, j);
        phys[c][a + M] = norm * acc.real();
      }
    } else {
      std::vector<cplx> G(total, 0.0);  // G[j0][b]
      for (long j0 = 0; j0 < side; ++j0)
        for (long b = -M; b <= M; ++b) {
          cplx acc = 0.0;
          for (long j1 = -M; j1 <= M; ++j1) acc += F[c][j0 * side + (j1 + M)] * tw(b, j1);
          G[j0 * side + (b + M)] = acc;
        }
      for (long a = -M; a <= M; ++a)
        for (long b = 0; b < side; ++b) {
          cplx acc = 0.0;
          for (long j0 = -M; j0 <= M; ++j0) acc += G[(j0 + M) * side + b] * tw(a, j0);
          phys[c][(a + M) * side + b] = norm * acc.real();
        }
    }
  }
  s.rho = std::move(phys[0]);
  for (int k = 0; k < n; ++k) s.v.push_back(std::move(phys[1 + k]));
  return s;
}

void write_snapshot(std::ostream& os, const GridSnapshot& s) {
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return std::string(buf);
  };
  os << "# n=" << s.n << " h=" << num(s.h) << " R=" << num(s.R) << " t=" << num(s.t) << '\n';
  const std::size_t side = s.axis.size();
  const std::size_t total = s.rho.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (s.n == 1) {
      os << num(s.axis[idx]);
    } else {
      os << num(s.axis[idx / side]) << ' ' << num(s.axis[idx % side]);
    }
    os << ' ' << num(s.rho[idx]);
    for (const auto& comp : s.v) os << ' ' << num(comp[idx]);
    os << '\n';
  }
}

void write_norm_table(std::ostream& os, std::span<const double> times, std::span<const double> values,
                      const Envelope& env) {
  if (times.size() != values.size()) throw PreconditionError("times and values must have equal length");
  os << "t,value,envelope,ratio\n";
  char buf[128];
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double e = env(times[i]);
    std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e\n", times[i], values[i], e, values[i] / e);
    os << buf;
  }
}

}  // namespace nsdecay
