#include "nsdecay/spectral_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsdecay/errors.hpp"

namespace nsdecay {

namespace {

constexpr cplx kI{0.0, 1.0};

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

void check_point(const FluidParams& p, const InitialDatum& d, double t, std::span<const double> xi) {
  p.validate();
  if (d.dim() != p.n || static_cast<int>(xi.size()) != p.n)
    throw PreconditionError("datum, parameters and frequency must share the dimension");
  if (!(t >= 0.0)) throw PreconditionError("time must be >= 0");
}

}  // namespace

CharRoots char_roots(const FluidParams& p, double r) {
  p.validate();
  if (!(r > 0.0)) throw PreconditionError("char_roots needs r > 0");
  const double s = p.half_viscous();
  const double g = p.gamma;
  const double rstar = p.degenerate_radius();
  const double m = -s * r * r;

  CharRoots out;
  if (std::abs(r - rstar) <= kDegenerateBand * rstar) {
    out.regime = Regime::degenerate;
    out.lambda_plus = out.lambda_minus = m;
    out.lambda_r = m;
    out.lambda_i = 0.0;
  } else if (r < rstar) {
    // discriminant r^2 (s r - g)(s r + g) factored to stay accurate near r*
    const double w = r * std::sqrt((g - s * r) * (g + s * r));
    out.regime = Regime::oscillatory;
    out.lambda_plus = {m, w};
    out.lambda_minus = {m, -w};
    out.lambda_r = m;
    out.lambda_i = w;
  } else {
    const double delta = r * std::sqrt((s * r - g) * (s * r + g));
    const double minus = m - delta;
    out.regime = Regime::overdamped;
    out.lambda_minus = minus;
    out.lambda_plus = g * g * r * r / minus;  // Vieta, avoids cancellation in m + delta
    out.lambda_r = std::numeric_limits<double>::quiet_NaN();
    out.lambda_i = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

cplx exp_diff(cplx a, cplx b, double t) {
  if (!(t >= 0.0)) throw PreconditionError("exp_diff needs t >= 0");
  const cplx z = 0.5 * (a - b) * t;
  if (std::abs(z) < 0.5) {
    // e^{mt} t sinh(z)/z with the even series of sinh(z)/z
    const cplx z2 = z * z;
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k <= 12; ++k) {
      term *= z2 / static_cast<double>((2 * k) * (2 * k + 1));
      sum += term;
    }
    return std::exp(0.5 * (a + b) * t) * t * sum;
  }
  return (std::exp(a * t) - std::exp(b * t)) / (a - b);
}

FrequencyWindow FrequencyWindow::defaults(const FluidParams& p, Zone zone) {
  const double ratio = p.gamma / p.viscous_sum();
  return {std::min(1.0, ratio), std::max(2.0, 4.0 * ratio), zone};
}

void FrequencyWindow::validate() const {
  if (!(eps0 > 0.0 && eps0 < n0)) throw PreconditionError("frequency window needs 0 < eps0 < n0");
}

std::pair<double, double> FrequencyWindow::radial_range() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (selector) {
    case Zone::interior: return {0.0, eps0};
    case Zone::bounded: return {eps0, n0};
    case Zone::exterior: return {n0, inf};
    case Zone::all: return {0.0, inf};
  }
  return {0.0, inf};
}

SolutionKernels solution_kernels(const FluidParams& p, double r, double t) {
  if (!(t >= 0.0)) throw PreconditionError("time must be >= 0");
  SolutionKernels k;
  k.roots = char_roots(p, r);
  k.r = r;
  k.t = t;
  const cplx lp = k.roots.lambda_plus;
  const cplx lm = k.roots.lambda_minus;
  k.E = exp_diff(lp, lm, t);
  const cplx em = std::exp(lm * t);
  k.A = em - lm * k.E;
  k.C = em + lp * k.E;
  k.heat_alpha = std::exp(-p.alpha * r * r * t);
  k.heat_half = std::exp(-p.half_viscous() * r * r * t);
  return k;
}

SpectralState solve(const FluidParams& p, const InitialDatum& d, double t, std::span<const double> xi) {
  check_point(p, d, t, xi);
  const double r = norm2(xi);
  if (r == 0.0) throw PreconditionError("the representation is evaluated at xi != 0");
  const int n = p.n;
  const SolutionKernels k = solution_kernels(p, r, t);

  const cplx rho0 = d.rho0(xi);
  std::vector<cplx> v0(n);
  d.v0(xi, v0);
  cplx xv0 = 0.0;
  for (int i = 0; i < n; ++i) xv0 += xi[i] * v0[i];

  SpectralState s;
  s.rho_hat = k.A * rho0 - kI * p.gamma * k.E * xv0;
  s.v_hat.resize(n);
  const cplx proj = (k.C - k.heat_alpha) * xv0 / (r * r);
  for (int i = 0; i < n; ++i)
    s.v_hat[i] = k.heat_alpha * v0[i] - kI * p.gamma * k.E * xi[i] * rho0 + proj * xi[i];
  return s;
}

cplx rho_hat(const FluidParams& p, const InitialDatum& d, double t, std::span<const double> xi) {
  return solve(p, d, t, xi).rho_hat;
}

std::vector<cplx> v_hat(const FluidParams& p, const InitialDatum& d, double t, std::span<const double> xi) {
  return solve(p, d, t, xi).v_hat;
}

double system_residual(const FluidParams& p, const InitialDatum& d, double t, std::span<const double> xi) {
  check_point(p, d, t, xi);
  const double r = norm2(xi);
  if (r == 0.0) throw PreconditionError("the representation is evaluated at xi != 0");
  const int n = p.n;
  const SolutionKernels k = solution_kernels(p, r, t);
  const cplx lp = k.roots.lambda_plus;
  const cplx lm = k.roots.lambda_minus;
  const cplx prod = lp * lm;
  const cplx sum = lp + lm;
  const double r2 = r * r;

  // d/dt of the time factors
  const cplx dA = -prod * k.E;
  const cplx dE = k.C;
  const cplx dC = sum * k.C - prod * k.E;
  const cplx ddA = -prod * dE;
  const cplx ddE = dC;
  const double dH = -p.alpha * r2 * k.heat_alpha;

  const cplx rho0 = d.rho0(xi);
  std::vector<cplx> v0(n);
  d.v0(xi, v0);
  cplx xv0 = 0.0;
  for (int i = 0; i < n; ++i) xv0 += xi[i] * v0[i];

  const cplx rho = k.A * rho0 - kI * p.gamma * k.E * xv0;
  const cplx rho_t = dA * rho0 - kI * p.gamma * dE * xv0;
  const cplx rho_tt = ddA * rho0 - kI * p.gamma * ddE * xv0;

  std::vector<cplx> v(n), v_t(n);
  cplx xv = 0.0;
  for (int i = 0; i < n; ++i) {
    v[i] = k.heat_alpha * v0[i] - kI * p.gamma * k.E * xi[i] * rho0 + (k.C - k.heat_alpha) * xv0 * xi[i] / r2;
    v_t[i] = dH * v0[i] - kI * p.gamma * dE * xi[i] * rho0 + (dC - dH) * xv0 * xi[i] / r2;
    xv += xi[i] * v[i];
  }

  double res = std::abs(rho_t + kI * p.gamma * xv);
  for (int i = 0; i < n; ++i) {
    const cplx line = v_t[i] + p.alpha * r2 * v[i] + p.beta * xi[i] * xv + kI * p.gamma * xi[i] * rho;
    res = std::max(res, std::abs(line));
  }
  const cplx wave = rho_tt + p.gamma * p.gamma * r2 * rho + p.viscous_sum() * r2 * rho_t;
  return std::max(res, std::abs(wave));
}

}  // namespace nsdecay
