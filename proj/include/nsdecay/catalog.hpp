#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "nsdecay/core_model.hpp"

namespace nsdecay {

using cplx = std::complex<double>;

/// Transforms use g^(xi) = int exp(-i x.xi) g(x) dx, so near the origin
///   g^(xi) = P_g + kMomentPhase * (xi . Q_g) + O(|xi|^2).
inline constexpr cplx kMomentPhase{0.0, -1.0};

enum class LeafKind { gaussian, monomial };

/// One summand c * leaf(x - shift) of a generator in normal form.
/// Leaves: gaussian a exp(-|x|^2/w^2), monomial a x_axis exp(-|x|^2/w^2).
struct GeneratorTerm {
  LeafKind kind = LeafKind::gaussian;
  int axis = 0;
  double width = 1.0;
  double amplitude = 1.0;
  std::vector<double> shift;

  bool same_shape(const GeneratorTerm& o) const {
    return kind == o.kind && axis == o.axis && width == o.width && shift == o.shift;
  }
};

enum class GeneratorTag { zero, gaussian, monomial_gaussian, shifted, scaled, sum };

/// Closed-form L1 function on R^n with exact Fourier transform and moments.
/// Internally kept as a finite sum of shifted Gaussian / monomial-Gaussian leaves.
class Generator {
 public:
  Generator() = default;
  Generator(int n, GeneratorTag tag, std::vector<GeneratorTerm> terms);

  int dim() const { return n_; }
  GeneratorTag tag() const { return tag_; }
  std::span<const GeneratorTerm> terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  cplx fourier(std::span<const double> xi) const;
  double value(std::span<const double> x) const;

  /// P_g = int g.
  double mean() const { return mean_; }
  /// Q_g = int x g.
  std::span<const double> first_moment() const { return first_moment_; }

  /// Certified upper bound on int (1+|x|)^s |g|, exact for a single unshifted leaf.
  double weighted_norm_bound(int s) const;
  bool weighted_norm_is_exact() const;

  /// Radius beyond which |g^| is below e^-40 relative to its scale.
  double spectral_radius() const;

  std::string describe() const;

 private:
  int n_ = 0;
  GeneratorTag tag_ = GeneratorTag::zero;
  std::vector<GeneratorTerm> terms_;
  std::vector<double> leaf_mass_;  // amplitude * (w sqrt(pi))^n per term
  double mean_ = 0.0;
  std::vector<double> first_moment_;
};

Generator make_zero(int n);
Generator make_gaussian(int n, double width, double amplitude);
/// a * x_axis * exp(-|x|^2/w^2), axis is 0-based.
Generator make_monomial_gaussian(int n, int axis, double width, double amplitude);
/// x -> g(x - a).
Generator shift(const Generator& g, std::span<const double> a);
Generator scale(const Generator& g, double s);
Generator combine(std::span<const double> coeffs, std::span<const Generator> gs);
/// Relabels coordinates: the result evaluated at y equals g at x with x_i = y_{perm[i]}.
Generator permute_axes(const Generator& g, std::span<const int> perm);

/// E_g(xi) = g^(xi) - P_g - kMomentPhase (xi . Q_g).
cplx moment_expansion_remainder(const Generator& g, std::span<const double> xi);

/// int (1+|x|)^s |g(x)| dx: closed form when exact, otherwise adaptive physical-space
/// quadrature (relative tolerance 1e-8).
double weighted_l1_norm(const Generator& g, int s);

enum class DatumMode { dot_H11, direct };

/// Initial data (rho0, v0). In dot_H11 mode rho0^ = g_rho^/|xi|, v0^(k) = g_v[k]^/|xi|;
/// in direct mode rho0^ = g_rho^, v0^(k) = g_v[k]^.
class InitialDatum {
 public:
  InitialDatum(DatumMode mode, Generator g_rho, std::vector<Generator> g_v, Thresholds th);

  DatumMode mode() const { return mode_; }
  int dim() const { return g_rho_.dim(); }
  const Generator& g_rho() const { return g_rho_; }
  const std::vector<Generator>& g_v() const { return g_v_; }
  const Thresholds& thresholds() const { return thresholds_; }

  /// rho0^(xi); xi != 0 in dot_H11 mode.
  cplx rho0(std::span<const double> xi) const;
  void v0(std::span<const double> xi, std::span<cplx> out) const;
  /// |xi| rho0^(xi), finite at xi = 0 in both modes.
  cplx rho0_scaled(std::span<const double> xi) const;
  void v0_scaled(std::span<const double> xi, std::span<cplx> out) const;

  /// Numerical decision for |B0| = 0.
  bool b0_vanishes() const;
  double b0_gate() const { return b0_gate_; }
  bool velocity_is_zero() const;
  double spectral_radius() const;

 private:
  DatumMode mode_;
  Generator g_rho_;
  std::vector<Generator> g_v_;
  Thresholds thresholds_;
  double b0_gate_ = 0.0;
};

InitialDatum build_datum(DatumMode mode, Generator g_rho, std::vector<Generator> g_v);

/// P/Q moments of (|D|rho0, |D|v0) and the derived |B0|, |B1|.
Thresholds thresholds_of(const InitialDatum& d);

}  // namespace nsdecay
