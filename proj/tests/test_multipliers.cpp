#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nsdecay/errors.hpp"
#include "nsdecay/multipliers.hpp"
#include "nsdecay/norm_engine.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace nsdecay;
using testing_support::random_direction;
using testing_support::rel_err;
using testing_support::scaled;
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

namespace {

// Textbook forms evaluated directly from cos/sin/exp.
JFamily naive_j(const FluidParams& p, double t, double r) {
  const double e = std::exp(-p.half_viscous() * r * r * t), ha = std::exp(-p.alpha * r * r * t);
  const double c = std::cos(p.gamma * r * t), s = std::sin(p.gamma * r * t);
  return {(c - 1.0) * e / r, s * e / r, (c * e - ha) / r};
}

// K family from extended-precision roots: A = e^{l- t} - l- E, C = e^{l- t} + l+ E.
KFamily reference_k(const FluidParams& p, double t, double r) {
  const auto [lp, lm] = oracle::quadratic_roots(p.alpha, p.beta, p.gamma, r);
  const cplx E = oracle::exp_diff_reference(lp, lm, t);
  const cplx em = std::exp(lm * t);
  const cplx A = em - lm * E, C = em + lp * E;
  const double e = std::exp(-p.half_viscous() * r * r * t), ha = std::exp(-p.alpha * r * r * t);
  return {(A.real() - e) / r, p.gamma * E.real(), (C.real() - ha) / r};
}

InitialDatum mixed(int n) {
  std::vector<double> a(n, 0.3);
  std::vector<Generator> gv;
  for (int k = 0; k < n; ++k) gv.push_back(make_monomial_gaussian(n, (k + 1) % n, 0.8 + 0.1 * k, 1.0 - 0.3 * k));
  gv[0] = combine(std::vector<double>{1.0, 1.0}, std::vector<Generator>{gv[0], make_gaussian(n, 0.7, 0.4)});
  return build_datum(DatumMode::dot_H11, shift(make_gaussian(n, 1.0, 1.0), a), gv);
}

}  // namespace

TEST_CASE("J family matches the textbook forms away from cancellation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ur(0.05, 5.0), ut(0.0, 30.0);
  const FluidParams p{0.9, 0.4, 1.7, 1};
  for (int i = 0; i < 2000; ++i) {
    const double r = ur(rng), t = ut(rng);
    const JFamily a = j_family(p, t, r), b = naive_j(p, t, r);
    CHECK(std::abs(a.j0 - b.j0) <= 1e-12 * (1.0 / r + std::abs(b.j0)));
    CHECK(std::abs(a.j1 - b.j1) <= 1e-12 * (1.0 / r + std::abs(b.j1)));
    CHECK(std::abs(a.j2 - b.j2) <= 1e-12 * (1.0 / r + std::abs(b.j2)));
  }
}

TEST_CASE("K family matches extended-precision roots") {
  std::mt19937_64 rng(6);
  const FluidParams p{0.9, 0.4, 1.7, 1};
  std::uniform_real_distribution<double> ur(0.02, 0.9 * p.degenerate_radius()), ut(0.0, 30.0);
  for (int i = 0; i < 500; ++i) {
    const double r = ur(rng), t = ut(rng);
    const KFamily a = k_family(p, t, r), b = reference_k(p, t, r);
    CHECK(std::abs(a.k0 - b.k0) <= 1e-11 * (1.0 + std::abs(b.k0)));
    CHECK(std::abs(a.k1 - b.k1) <= 1e-11 * (1.0 + std::abs(b.k1)));
    CHECK(std::abs(a.k2 - b.k2) <= 1e-11 * (1.0 + std::abs(b.k2)));
  }
}

TEST_CASE("K family is restricted to the oscillatory regime") {
  const FluidParams p{1.0, 1.0, 1.0, 1};
  CHECK_THROWS_AS(k_family(p, 1.0, 1.0), RegimeError);
  CHECK_THROWS_AS(k_family(p, 1.0, 3.0), RegimeError);
  const double xi[] = {2.0};
  CHECK_THROWS_AS(eval_multiplier(MultiplierId::K0, p, 1.0, xi), RegimeError);
  CHECK_THROWS_AS(multiplier_gap(MultiplierId::K0, MultiplierId::J0, p, 1.0, 2.0), RegimeError);
  CHECK_THROWS_AS(multiplier_gap(MultiplierId::K0, MultiplierId::J1, p, 1.0, 0.1), PreconditionError);
  const double z[] = {0.0};
  CHECK_THROWS_AS(eval_multiplier(MultiplierId::J0, p, 1.0, z), PreconditionError);
  CHECK_THROWS_AS(eval_multiplier(MultiplierId::J0, p, -1.0, xi), PreconditionError);
}

TEST_CASE("multiplier examples") {
  const FluidParams p{1.0, 1.0, 1.3, 1};
  for (double r : {0.1, 0.7, 2.0}) {
    const double t = 2.0 * pi / (p.gamma * r);
    CHECK(std::abs(j_family(p, t, r).j0) < 1e-14 / r);
  }
  for (double r : {0.01, 0.5, 3.0}) {
    CHECK(std::abs(j_family(p, 1e-14, r).j2) < 1e-12);
    CHECK(j_family(p, 0.0, r).j2 == 0.0);
  }
  const double xi[] = {0.4};
  CHECK(eval_multiplier(MultiplierId::heat_alpha, p, 2.0, xi)[0].real() == doctest::Approx(std::exp(-0.32)).epsilon(1e-15));
  CHECK(eval_multiplier(MultiplierId::heat_half, p, 2.0, xi)[0].real() == doctest::Approx(std::exp(-0.32)).epsilon(1e-15));
}

TEST_CASE("J0, J2 are real and J1, K1 are imaginary along the direction") {
  std::mt19937_64 rng(9);
  for (int n = 1; n <= 3; ++n) {
    const FluidParams p{1.0, 0.5, 1.2, n};
    for (int i = 0; i < 100; ++i) {
      const auto w = random_direction(rng, n);
      const auto xi = scaled(w, 0.01 + 0.005 * i);
      const double t = 0.5 * i;
      CHECK(eval_multiplier(MultiplierId::J0, p, t, xi)[0].imag() == 0.0);
      CHECK(eval_multiplier(MultiplierId::J2, p, t, xi)[0].imag() == 0.0);
      const auto j1 = eval_multiplier(MultiplierId::J1, p, t, xi);
      const auto k1 = eval_multiplier(MultiplierId::K1, p, t, xi);
      const double s = j_family(p, t, 0.01 + 0.005 * i).j1;
      for (int k = 0; k < n; ++k) {
        CHECK(j1[k].real() == 0.0);
        CHECK(k1[k].real() == 0.0);
        CHECK(std::abs(j1[k] - (-I * s * w[k])) <= 1e-14 * (1 + std::abs(s)));
      }
    }
  }
}

TEST_CASE("J multipliers stay bounded near the origin") {
  const FluidParams p{1.0, 1.0, 1.5, 1};
  for (double t : {1.0, 10.0, 100.0})
    for (int k = 3; k <= 12; ++k) {
      const double r = std::pow(10.0, -k);
      const JFamily j = j_family(p, t, r);
      CHECK(std::abs(j.j0) <= p.gamma * p.gamma * t * t * r / 2.0 * (1.0 + 1e-6));
      CHECK(std::abs(j.j1) <= p.gamma * t * (1.0 + 1e-12));
      CHECK(std::abs(j.j2) <= 2.0 * (p.gamma * p.gamma * t * t + p.viscous_sum() * t) * r);
    }
}

TEST_CASE("gap between K and J stays bounded as r tends to zero") {
  const FluidParams p{1.0, 1.0, 1.0, 1};
  for (auto [k, j] : {std::pair{MultiplierId::K0, MultiplierId::J0}, std::pair{MultiplierId::K1, MultiplierId::J1},
                      std::pair{MultiplierId::K2, MultiplierId::J2}}) {
    double worst = 0.0;
    for (int e = 2; e <= 8; ++e) worst = std::max(worst, multiplier_gap(k, j, p, 100.0, std::pow(10.0, -e)));
    CHECK(std::isfinite(worst));
    CHECK(worst < 10.0);
  }
  CHECK(multiplier_gap(MultiplierId::K1, MultiplierId::J1, p, 0.0, 0.3) == 0.0);
  CHECK(multiplier_gap(MultiplierId::K0, MultiplierId::J0, p, 0.0, 0.3) == 0.0);
}

TEST_CASE("gap decays like exp(-(alpha+beta) r^2 t / 4) with a fitted constant") {
  const FluidParams p{1.0, 1.0, 1.0, 1};
  const double eps0 = FrequencyWindow::defaults(p).eps0;
  const double c = p.viscous_sum() / 4.0;
  auto scaled_gap = [&](MultiplierId k, MultiplierId j, double r, double t) {
    return multiplier_gap(k, j, p, t, r) * std::exp(c * r * r * t);
  };
  for (auto [k, j] : {std::pair{MultiplierId::K0, MultiplierId::J0}, std::pair{MultiplierId::K1, MultiplierId::J1},
                      std::pair{MultiplierId::K2, MultiplierId::J2}}) {
    double fitted = 0.0;
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        const double r = 1e-3 * std::pow(eps0 / 2.0 / 1e-3, a / 7.0);
        const double t = 10.0 * std::pow(1e3, b / 7.0);
        fitted = std::max(fitted, scaled_gap(k, j, r, t));
      }
    double fine = 0.0;
    for (int a = 0; a < 80; ++a)
      for (int b = 0; b < 80; ++b) {
        const double r = 1e-3 * std::pow(eps0 / 2.0 / 1e-3, (a + 0.5) / 80.0);
        const double t = 10.0 * std::pow(1e3, (b + 0.5) / 80.0);
        fine = std::max(fine, scaled_gap(k, j, r, t));
      }
    INFO("fitted " << fitted << " fine " << fine);
    CHECK(fine <= 2.0 * fitted);
  }
}

TEST_CASE("exact K identity in the oscillatory regime") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ut(0.0, 50.0);
  for (int n = 1; n <= 3; ++n) {
    const FluidParams p{0.8, 0.6, 1.1, n};
    const InitialDatum d = mixed(n);
    std::uniform_real_distribution<double> ur(1e-3, 0.99 * p.degenerate_radius());
    for (int i = 0; i < 200; ++i) {
      const double r = ur(rng), t = ut(rng);
      const auto w = random_direction(rng, n);
      const auto xi = scaled(w, r);
      const SpectralState s = solve(p, d, t, xi);
      const double heat = std::exp(-p.half_viscous() * r * r * t);
      std::vector<cplx> sv(n);
      d.v0_scaled(xi, sv);
      const auto k0 = eval_multiplier(MultiplierId::K0, p, t, xi)[0];
      const auto k1 = eval_multiplier(MultiplierId::K1, p, t, xi);
      cplx rhs = k0 * d.rho0_scaled(xi);
      for (int k = 0; k < n; ++k) rhs += k1[k] * sv[k];
      const cplx lhs = s.rho_hat - heat * d.rho0(xi);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(s.rho_hat) + std::abs(heat * d.rho0(xi))));
    }
  }
}

TEST_CASE("profile error estimates hold with fitted constants") {
  const int n = 2;
  const FluidParams p{1.0, 0.5, 1.2, n};
  const InitialDatum d = mixed(n);
  const double eps0 = FrequencyWindow::defaults(p).eps0;
  const double c = p.viscous_sum() / 4.0;
  std::mt19937_64 rng(12);
  const auto w = random_direction(rng, n);
  auto ratios = [&](double r, double t) {
    const auto xi = scaled(w, r);
    const SpectralState s = solve(p, d, t, xi);
    const double hh = std::exp(-p.half_viscous() * r * r * t), ha = std::exp(-p.alpha * r * r * t);
    const cplx srho = d.rho0_scaled(xi);
    std::vector<cplx> sv(n), v0(n);
    d.v0_scaled(xi, sv);
    d.v0(xi, v0);
    double size = std::abs(srho);
    for (const cplx& z : sv) size += std::abs(z);
    const JFamily j = j_family(p, t, r);
    cplx wsv = 0.0;
    for (int k = 0; k < n; ++k) wsv += w[k] * sv[k];
    const cplx rho_err = s.rho_hat - hh * d.rho0(xi) - (j.j0 * srho - I * j.j1 * wsv);
    double v_err = 0.0;
    for (int m = 0; m < n; ++m) {
      const cplx prof = -I * j.j1 * w[m] * srho + j.j2 * w[m] * wsv;
      v_err = std::max(v_err, std::abs(s.v_hat[m] - ha * v0[m] - prof));
    }
    // points where the envelope underflows are skipped
    const double scale = std::exp(-c * r * r * t) * size;
    if (!(scale > 1e-250)) return std::pair{0.0, 0.0};
    return std::pair{std::abs(rho_err) / scale, v_err / scale};
  };
  double fr = 0.0, fv = 0.0;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const auto [x, y] = ratios(1e-3 * std::pow(eps0 / 1e-3, a / 5.0), 1.0 * std::pow(1e4, b / 5.0));
      fr = std::max(fr, x);
      fv = std::max(fv, y);
    }
  for (int a = 0; a < 60; ++a)
    for (int b = 0; b < 60; ++b) {
      const auto [x, y] = ratios(1e-3 * std::pow(eps0 / 1e-3, (a + 0.5) / 60.0), std::pow(1e4, (b + 0.5) / 60.0));
      CHECK(x <= 2.0 * fr);
      CHECK(y <= 2.0 * fv);
    }
}

TEST_CASE("first-order profile examples") {
  const FluidParams p1{1.0, 1.0, 1.0, 1};
  const InitialDatum zero = build_datum(DatumMode::dot_H11, make_monomial_gaussian(1, 0, 1.0, 1.0), {make_zero(1)});
  const auto [zr, zv] = profile_first_order(zero, p1);
  const double xi[] = {0.37};
  cplx out[1];
  zr.eval(5.0, xi, out);
  CHECK(out[0] == cplx(0.0));
  zv.eval(5.0, xi, out);
  CHECK(out[0] == cplx(0.0));

  const InitialDatum g = build_datum(DatumMode::dot_H11, make_gaussian(1, 1.0, 1.0), {make_zero(1)});
  const auto [gr, gv] = profile_first_order(g, p1);
  for (double t : {0.5, 3.0, 40.0}) {
    gr.eval(t, xi, out);
    CHECK(std::abs(out[0] - std::sqrt(pi) * eval_multiplier(MultiplierId::J0, p1, t, xi)[0]) < 1e-14);
  }
  CHECK(gr.components() == 1);
  CHECK(gv.components() == 1);
}

TEST_CASE("profiles depend only on their moments") {
  const int n = 2;
  const FluidParams p{1.0, 0.3, 0.9, n};
  // same P, different Q
  const double a[] = {0.4, -0.2};
  const InitialDatum d1 = build_datum(DatumMode::dot_H11, make_gaussian(n, 1.0, 1.0), {make_zero(n), make_zero(n)});
  const InitialDatum d2 =
      build_datum(DatumMode::dot_H11, shift(make_gaussian(n, 1.0, 1.0), a), {make_zero(n), make_zero(n)});
  // same Q, different P: an even gaussian does not change Q
  const Generator m = make_monomial_gaussian(n, 0, 1.0, 1.0);
  const InitialDatum d3 = build_datum(DatumMode::dot_H11, m, {make_zero(n), make_zero(n)});
  const InitialDatum d4 = build_datum(
      DatumMode::dot_H11, combine(std::vector<double>{1.0, 1.0}, std::vector<Generator>{m, make_gaussian(n, 0.5, 2.0)}),
      {make_zero(n), make_zero(n)});
  const double xi[] = {0.2, -0.1};
  cplx x[2], y[2];
  profile_first_order(d1, p).first.eval(3.0, xi, x);
  profile_first_order(d2, p).first.eval(3.0, xi, y);
  CHECK(x[0] == y[0]);
  profile_first_order(d1, p).second.eval(3.0, xi, x);
  profile_first_order(d2, p).second.eval(3.0, xi, y);
  CHECK(x[0] == y[0]);
  CHECK(x[1] == y[1]);
  profile_second_order(d3, p).first.eval(3.0, xi, x);
  profile_second_order(d4, p).first.eval(3.0, xi, y);
  CHECK(x[0] == y[0]);
  profile_second_order(d3, p).second.eval(3.0, xi, x);
  profile_second_order(d4, p).second.eval(3.0, xi, y);
  CHECK(x[0] == y[0]);
  CHECK(x[1] == y[1]);
}

TEST_CASE("second-order profile examples") {
  const FluidParams p{1.0, 1.0, 1.3, 1};
  const InitialDatum zero = build_datum(DatumMode::dot_H11, make_gaussian(1, 1.0, 1.0), {make_zero(1)});
  cplx out[1];
  const double xi[] = {-0.6};
  profile_second_order(zero, p).first.eval(2.0, xi, out);
  CHECK(out[0] == cplx(0.0));
  profile_second_order(zero, p).second.eval(2.0, xi, out);
  CHECK(out[0] == cplx(0.0));

  const InitialDatum odd = build_datum(DatumMode::dot_H11, make_monomial_gaussian(1, 0, 1.0, 1.0), {make_zero(1)});
  const double q = odd.thresholds().q_rho[0];
  const auto rho2 = profile_second_order(odd, p).first;
  for (double x : {-0.6, 0.05, 1.4})
    for (double t : {0.5, 7.0}) {
      const double xs[] = {x};
      rho2.eval(t, xs, out);
      const double sign = x > 0 ? 1.0 : -1.0;
      const cplx expect =
          kMomentPhase * q * sign * std::cos(p.gamma * std::abs(x) * t) * std::exp(-p.half_viscous() * x * x * t);
      CHECK(std::abs(out[0] - expect) < 1e-14);
    }
}

TEST_CASE("second-order profile norm agrees with its radial-angular factorization") {
  for (int n = 1; n <= 3; ++n) {
    const FluidParams p{1.0, 0.5, 1.2, n};
    std::vector<double> a(n, 0.0);
    a[0] = 0.5;
    // Q_rho from a monomial plus a shift; a single velocity component k = n-1
    const Generator grho = combine(std::vector<double>{1.0, 1.0},
                                   std::vector<Generator>{make_monomial_gaussian(n, 0, 1.0, 1.0),
                                                          shift(make_gaussian(n, 1.0, 0.3), a)});
    std::vector<Generator> gv(n, make_zero(n));
    gv[n - 1] = make_monomial_gaussian(n, n - 1, 0.9, 0.8);
    const InitialDatum d = build_datum(DatumMode::dot_H11, grho, gv);
    const Thresholds& th = d.thresholds();
    const double t = 10.0;
    const auto prof = profile_second_order(d, p).first;
    FunctionField f(
        n,
        [&](std::span<const double> xi) {
          cplx o[1];
          prof.eval(t, xi, o);
          return o[0];
        },
        {p.gamma * t, p.half_viscous() * t});
    const double full = l2_norm_field(f, QuadratureSpec{}, FrequencyWindow{});

    const double e = p.viscous_sum() * t;  // e^{-(a+b) r^2 t} after squaring
    const double R = std::sqrt(45.0 / e);
    const double ic = oracle::integrate([&](double r) { const double c = std::cos(p.gamma * r * t); return c * c * std::exp(-e * r * r) * std::pow(r, n - 1); }, 0.0, R, 40);
    const double is = oracle::integrate([&](double r) { const double s = std::sin(p.gamma * r * t); return s * s * std::exp(-e * r * r) * std::pow(r, n - 1); }, 0.0, R, 40);
    double q2 = 0.0;
    for (double x : th.q_rho) q2 += x * x;
    const double ang_rho = sphere_measure(n) / n * q2;
    const double ang_v = sphere_quartic_moment(n, n - 1, th.q_v[n - 1]);
    const double factorized = std::sqrt(ic * ang_rho + is * ang_v);
    CHECK(rel_err(full, factorized) < 1e-6);
  }
}

TEST_CASE("first-order profile norm is self-convergent at large time") {
  const FluidParams p{1.0, 1.0, 1.0, 1};
  const InitialDatum d = build_datum(DatumMode::dot_H11, make_gaussian(1, 1.0, 1.0 / std::sqrt(pi)), {make_zero(1)});
  CHECK(d.thresholds().p_rho == doctest::Approx(1.0).epsilon(1e-15));
  const double t = 1e4;
  auto j0 = [&](double r) -> cplx { return j_family(p, t, r).j0; };
  QuadratureSpec coarse, fine;
  fine.panels_per_halfperiod = 8;
  const RadialHints h{p.gamma * t, p.half_viscous() * t};
  const double a = l2_norm_radial(j0, 1, coarse, h), b = l2_norm_radial(j0, 1, fine, h);
  CHECK(rel_err(a, b) < 1e-6);
  const double R = std::sqrt(45.0 / (p.viscous_sum() * t));
  const double ref = oracle::radial_norm([&](double r) { return j_family(p, t, r).j0; }, 1, 0.0, R, 800);
  CHECK(rel_err(a, ref) < 1e-8);
  // the field form of the profile reproduces the radial reduction
  const auto prof = profile_first_order(d, p).first;
  FunctionField f(
      1,
      [&](std::span<const double> xi) {
        cplx o[1];
        prof.eval(t, xi, o);
        return o[0];
      },
      h);
  CHECK(rel_err(l2_norm_field(f, coarse, FrequencyWindow{}), a) < 1e-8);
}
