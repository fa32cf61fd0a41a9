#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "nsdecay/catalog.hpp"
#include "nsdecay/core_model.hpp"

namespace nsdecay {

enum class Regime { oscillatory, degenerate, overdamped };

/// Roots of lambda^2 + (alpha+beta) r^2 lambda + gamma^2 r^2 = 0.
struct CharRoots {
  cplx lambda_plus;
  cplx lambda_minus;
  Regime regime = Regime::oscillatory;
  double lambda_r = 0.0;  // real part, oscillatory/degenerate regimes
  double lambda_i = 0.0;  // imaginary part of lambda_plus, >= 0
};

/// Relative half-width of the band around r* treated as a double root.
inline constexpr double kDegenerateBand = 1e-9;

CharRoots char_roots(const FluidParams& p, double r);

/// (e^{a t} - e^{b t}) / (a - b), continuous through a = b where it equals t e^{a t}.
cplx exp_diff(cplx a, cplx b, double t);

enum class Zone { interior, bounded, exterior, all };

/// Sharp frequency zones |xi| <= eps0, eps0 <= |xi| <= n0, |xi| >= n0.
struct FrequencyWindow {
  double eps0 = 0.5;
  double n0 = 2.0;
  Zone selector = Zone::all;

  /// eps0 = min(1, gamma/(alpha+beta)), n0 = max(2, 4 gamma/(alpha+beta)).
  static FrequencyWindow defaults(const FluidParams& p, Zone zone = Zone::all);
  void validate() const;
  /// Radial interval [lo, hi] of the selected zone (hi may be +inf).
  std::pair<double, double> radial_range() const;
};

/// Time factors of the Fourier representation at radius r:
///   rho^ = A rho0^ - i gamma E (xi . v0^)
///   v^   = H_a v0^ - i gamma E xi rho0^ + (C - H_a) xi (xi . v0^) / |xi|^2
/// with E = exp_diff(l+, l-, t), A = e^{l- t} - l- E, C = e^{l- t} + l+ E.
struct SolutionKernels {
  CharRoots roots;
  double r = 0.0;
  double t = 0.0;
  cplx A, E, C;
  double heat_alpha = 1.0;  // exp(-alpha r^2 t)
  double heat_half = 1.0;   // exp(-(alpha+beta) r^2 t / 2)
};

SolutionKernels solution_kernels(const FluidParams& p, double r, double t);

struct SpectralState {
  cplx rho_hat;
  std::vector<cplx> v_hat;
};

cplx rho_hat(const FluidParams& p, const InitialDatum& d, double t, std::span<const double> xi);
std::vector<cplx> v_hat(const FluidParams& p, const InitialDatum& d, double t, std::span<const double> xi);
SpectralState solve(const FluidParams& p, const InitialDatum& d, double t, std::span<const double> xi);

/// Largest absolute residual of the Fourier system, its velocity line, and the damped
/// wave equation for rho^, with time derivatives taken analytically.
double system_residual(const FluidParams& p, const InitialDatum& d, double t, std::span<const double> xi);

}  // namespace nsdecay
