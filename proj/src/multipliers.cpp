#include "nsdecay/multipliers.hpp"

#include <cmath>

#include "nsdecay/errors.hpp"

namespace nsdecay {

namespace {

constexpr cplx kI{0.0, 1.0};

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

// sin(x)/x
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

double half_versine(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;  // 1 - cos x
}

void check_time_radius(double t, double r) {
  if (!(t >= 0.0)) throw PreconditionError("multipliers need t >= 0");
  if (!(r > 0.0)) throw PreconditionError("multipliers are evaluated at xi != 0");
}

}  // namespace

JFamily j_family(const FluidParams& p, double t, double r) {
  check_time_radius(t, r);
  const double s = p.half_viscous();
  const double x = r * r * t;
  const double h = std::exp(-s * x);
  const double ha = std::exp(-p.alpha * x);
  const double phase = p.gamma * r * t;
  JFamily j;
  j.j0 = -half_versine(phase) * h / r;
  j.j1 = std::sin(phase) * h / r;
  // cos(phase) h - ha = (cos - 1) h + ha (e^{(alpha - s) x} - 1)
  j.j2 = (-half_versine(phase) * h + ha * std::expm1((p.alpha - s) * x)) / r;
  return j;
}

KFamily k_family(const FluidParams& p, double t, const CharRoots& roots, double r) {
  check_time_radius(t, r);
  if (roots.regime != Regime::oscillatory)
    throw RegimeError("K-family multipliers are defined for 0 < |xi| < r* only");
  const double lr = roots.lambda_r;
  const double li = roots.lambda_i;
  const double x = r * r * t;
  const double e = std::exp(lr * t);
  const double h = std::exp(-p.half_viscous() * x);
  const double ha = std::exp(-p.alpha * x);
  const double sc = t * sinc(li * t);  // sin(l_I t) / l_I
  const double vers = half_versine(li * t);
  KFamily k;
  k.k0 = (e * (-vers - lr * sc) + h * std::expm1((lr + p.half_viscous() * r * r) * t)) / r;
  k.k1 = p.gamma * sc * e;
  k.k2 = (e * (-vers + lr * sc) + ha * std::expm1((lr + p.alpha * r * r) * t)) / r;
  return k;
}

KFamily k_family(const FluidParams& p, double t, double r) {
  return k_family(p, t, char_roots(p, r), r);
}

std::vector<cplx> eval_multiplier(MultiplierId id, const FluidParams& p, double t, std::span<const double> xi) {
  p.validate();
  if (static_cast<int>(xi.size()) != p.n) throw PreconditionError("frequency length must equal n");
  const double r = norm2(xi);
  check_time_radius(t, r);
  auto along = [&](double scalar) {
    std::vector<cplx> v(p.n);
    for (int i = 0; i < p.n; ++i) v[i] = -kI * scalar * (xi[i] / r);
    return v;
  };
  switch (id) {
    case MultiplierId::J0: return {j_family(p, t, r).j0};
    case MultiplierId::J1: return along(j_family(p, t, r).j1);
    case MultiplierId::J2: return {j_family(p, t, r).j2};
    case MultiplierId::K0: return {k_family(p, t, r).k0};
    case MultiplierId::K1: return along(k_family(p, t, r).k1);
    case MultiplierId::K2: return {k_family(p, t, r).k2};
    case MultiplierId::heat_alpha: return {std::exp(-p.alpha * r * r * t)};
    case MultiplierId::heat_half: return {std::exp(-p.half_viscous() * r * r * t)};
  }
  return {};
}

double multiplier_gap(MultiplierId k_id, MultiplierId j_id, const FluidParams& p, double t, double r) {
  p.validate();
  const KFamily k = k_family(p, t, r);
  const JFamily j = j_family(p, t, r);
  if (k_id == MultiplierId::K0 && j_id == MultiplierId::J0) return std::abs(k.k0 - j.j0);
  if (k_id == MultiplierId::K1 && j_id == MultiplierId::J1) return std::abs(k.k1 - j.j1);
  if (k_id == MultiplierId::K2 && j_id == MultiplierId::J2) return std::abs(k.k2 - j.j2);
  throw PreconditionError("multiplier_gap compares K0/J0, K1/J1 or K2/J2");
}

ProfileField::ProfileField(ProfileKind kind, FluidParams p, Thresholds th)
    : kind_(kind), p_(p), th_(std::move(th)) {
  p_.validate();
  if (th_.dim() != p_.n) throw PreconditionError("profile moments must have dimension n");
}

int ProfileField::components() const {
  return kind_ == ProfileKind::first_order_rho || kind_ == ProfileKind::second_order_rho ? 1 : p_.n;
}

void ProfileField::eval(double t, std::span<const double> xi, std::span<cplx> out) const {
  if (static_cast<int>(xi.size()) != p_.n) throw PreconditionError("frequency length must equal n");
  const double r = norm2(xi);
  check_time_radius(t, r);
  const JFamily j = j_family(p_, t, r);
  std::vector<double> omega(p_.n);
  for (int i = 0; i < p_.n; ++i) omega[i] = xi[i] / r;
  eval_with(j, std::exp(-p_.alpha * r * r * t), std::exp(-p_.half_viscous() * r * r * t), r, omega, out);
}

void ProfileField::eval_with(const JFamily& j, double heat_alpha, double heat_half, double r,
                             std::span<const double> omega, std::span<cplx> out) const {
  const int n = p_.n;
  auto dot = [&](std::span<const double> a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += omega[i] * a[i];
    return s;
  };
  switch (kind_) {
    case ProfileKind::first_order_rho:
      out[0] = j.j0 * th_.p_rho - kI * j.j1 * dot(th_.p_v);
      return;
    case ProfileKind::first_order_v: {
      const double wp = dot(th_.p_v);
      for (int m = 0; m < n; ++m) out[m] = -kI * j.j1 * omega[m] * th_.p_rho + j.j2 * omega[m] * wp;
      return;
    }
    case ProfileKind::second_order_rho: {
      const double cos_h = j.j0 * r + heat_half;  // cos(g r t) e^{-(a+b) r^2 t/2}
      const double sin_h = j.j1 * r;
      double mixed = 0.0;  // sum_k w_k (w . Q_v(k))
      for (int k = 0; k < n; ++k) mixed += omega[k] * dot(th_.q_v[k]);
      out[0] = kMomentPhase * (cos_h * dot(th_.q_rho) - kI * sin_h * mixed);
      return;
    }
    case ProfileKind::second_order_v: {
      const double sin_h = j.j1 * r;
      const double j2r = j.j2 * r;
      const double wq = dot(th_.q_rho);
      double mixed = 0.0;
      for (int k = 0; k < n; ++k) mixed += omega[k] * dot(th_.q_v[k]);
      for (int m = 0; m < n; ++m)
        out[m] = kMomentPhase * (-kI * sin_h * omega[m] * wq + heat_alpha * dot(th_.q_v[m]) + j2r * omega[m] * mixed);
      return;
    }
  }
}

std::pair<ProfileField, ProfileField> profile_first_order(const InitialDatum& d, const FluidParams& p) {
  return {ProfileField(ProfileKind::first_order_rho, p, d.thresholds()),
          ProfileField(ProfileKind::first_order_v, p, d.thresholds())};
}

std::pair<ProfileField, ProfileField> profile_second_order(const InitialDatum& d, const FluidParams& p) {
  return {ProfileField(ProfileKind::second_order_rho, p, d.thresholds()),
          ProfileField(ProfileKind::second_order_v, p, d.thresholds())};
}

}  // namespace nsdecay
