#pragma once

#include <span>
#include <string>
#include <vector>

namespace nsdecay {

/// Coefficients of the linearized system
///   rho_t + gamma div v = 0,
///   v_t - alpha Lap v - beta grad div v + gamma grad rho = 0
/// in R^n.
struct FluidParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  int n = 1;

  /// Throws PreconditionError unless alpha > 0, beta >= 0, gamma > 0, n >= 1.
  void validate() const;

  double viscous_sum() const { return alpha + beta; }
  /// (alpha + beta) / 2, the damping rate of the sound modes.
  double half_viscous() const { return 0.5 * (alpha + beta); }
  /// r* = 2 gamma / (alpha + beta): the characteristic roots coincide at |xi| = r*.
  double degenerate_radius() const { return 2.0 * gamma / (alpha + beta); }

  bool operator==(const FluidParams&) const = default;
};

enum class EnvelopeKind { sqrt_t, sqrt_log_t, power };

/// Large-time reference curve a measured norm is compared against.
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::power;
  double exponent = 0.0;  // only for power

  static Envelope sqrt_t() { return {EnvelopeKind::sqrt_t, 0.5}; }
  static Envelope sqrt_log_t() { return {EnvelopeKind::sqrt_log_t, 0.0}; }
  static Envelope power_law(double p) { return {EnvelopeKind::power, p}; }
  /// The growth/decay envelope D_n(t): sqrt(t), sqrt(ln t), t^(1/2 - n/4).
  static Envelope growth(int n);

  double operator()(double t) const;
  std::string label() const;
};

/// D_n(t). Rejects n < 1, t <= 0, and t <= 1 when n = 2.
double decay_function(int n, double t);

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2); equals 2 for n = 1 (two-point counting measure).
double sphere_measure(int n);

/// Integral over S^{n-1} of w_j w_k (0-based indices).
double sphere_quadratic_moment(int n, int j, int k);

/// Integral over S^{n-1} of w_k^2 (w . q)^2, closed form
///   pi^{n/2} / Gamma((n+4)/2) * (|q|^2 / 2 + q_k^2).
double sphere_quartic_moment(int n, int k, std::span<const double> q);

/// Thresholds built from the means P and first moments Q of |D|rho0 and |D|v0.
struct Thresholds {
  double b0 = 0.0;
  double b1 = 0.0;
  double p_rho = 0.0;
  std::vector<double> p_v;               // P of |D|v0^(k), k = 0..n-1
  std::vector<double> q_rho;             // Q of |D|rho0
  std::vector<std::vector<double>> q_v;  // row k = Q of |D|v0^(k)

  int dim() const { return static_cast<int>(q_rho.size()); }
};

/// Assembles b0 = sqrt(P_rho^2 + |P_v|^2) and
/// b1 = sqrt(|Q_rho|^2 + sum_k (|Q_v(k)|^2 + Q_v(k)_k^2)).
Thresholds make_thresholds(double p_rho, std::vector<double> p_v,
                           std::vector<double> q_rho,
                           std::vector<std::vector<double>> q_v);

}  // namespace nsdecay
