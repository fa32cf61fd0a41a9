#include "nsdecay/core_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nsdecay/errors.hpp"

namespace nsdecay {

void FluidParams::validate() const {
  if (!(alpha > 0.0)) throw PreconditionError("alpha must be > 0");
  if (!(beta >= 0.0)) throw PreconditionError("beta must be >= 0");
  if (!(gamma > 0.0)) throw PreconditionError("gamma must be > 0");
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
}

Envelope Envelope::growth(int n) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  if (n == 1) return sqrt_t();
  if (n == 2) return sqrt_log_t();
  return power_law(0.5 - 0.25 * n);
}

double Envelope::operator()(double t) const {
  switch (kind) {
    case EnvelopeKind::sqrt_t:
      if (!(t >= 0.0)) throw PreconditionError("envelope sqrt(t) needs t >= 0");
      return std::sqrt(t);
    case EnvelopeKind::sqrt_log_t:
      if (!(t > 1.0)) throw PreconditionError("envelope sqrt(ln t) needs t > 1");
      return std::sqrt(std::log(t));
    case EnvelopeKind::power:
      if (!(t > 0.0)) throw PreconditionError("power envelope needs t > 0");
      return std::pow(t, exponent);
  }
  return 0.0;
}

std::string Envelope::label() const {
  switch (kind) {
    case EnvelopeKind::sqrt_t: return "sqrt(t)";
    case EnvelopeKind::sqrt_log_t: return "sqrt(ln t)";
    case EnvelopeKind::power: {
      std::ostringstream os;
      os << "t^(" << exponent << ")";
      return os.str();
    }
  }
  return {};
}

double decay_function(int n, double t) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  if (!(t > 0.0)) throw PreconditionError("decay function needs t > 0");
  if (n == 2 && !(t > 1.0)) throw PreconditionError("D_2(t) = sqrt(ln t) needs t > 1");
  return Envelope::growth(n)(t);
}

double sphere_measure(int n) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  // |S^{n-1}| = 2 pi / (n - 2) * |S^{n-3}|, seeded with |S^0| = 2 and |S^1| = 2 pi.
  double m = n % 2 == 1 ? 2.0 : 2.0 * std::numbers::pi;
  for (int k = n % 2 == 1 ? 3 : 4; k <= n; k += 2) m *= 2.0 * std::numbers::pi / (k - 2);
  return m;
}

double sphere_quadratic_moment(int n, int j, int k) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  if (j < 0 || j >= n || k < 0 || k >= n) throw PreconditionError("sphere moment index out of range");
  return j == k ? sphere_measure(n) / n : 0.0;
}

double sphere_quartic_moment(int n, int k, std::span<const double> q) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  if (static_cast<int>(q.size()) != n) throw PreconditionError("moment vector length must equal n");
  if (k < 0 || k >= n) throw PreconditionError("sphere moment index out of range");
  double q2 = 0.0;
  for (double x : q) q2 += x * x;
  const double c = std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * (n + 4));
  return c * (0.5 * q2 + q[k] * q[k]);
}

Thresholds make_thresholds(double p_rho, std::vector<double> p_v, std::vector<double> q_rho,
                           std::vector<std::vector<double>> q_v) {
  const std::size_t n = q_rho.size();
  if (n == 0 || p_v.size() != n || q_v.size() != n)
    throw PreconditionError("threshold moments have inconsistent dimensions");
  for (const auto& row : q_v)
    if (row.size() != n) throw PreconditionError("threshold moments have inconsistent dimensions");

  Thresholds th;
  double s0 = p_rho * p_rho;
  for (double p : p_v) s0 += p * p;
  double s1 = 0.0;
  for (double q : q_rho) s1 += q * q;
  for (std::size_t k = 0; k < n; ++k) {
    for (double q : q_v[k]) s1 += q * q;
    s1 += q_v[k][k] * q_v[k][k];
  }
  th.b0 = std::sqrt(s0);
  th.b1 = std::sqrt(s1);
  th.p_rho = p_rho;
  th.p_v = std::move(p_v);
  th.q_rho = std::move(q_rho);
  th.q_v = std::move(q_v);
  return th;
}

}  // namespace nsdecay
