#include "nsdecay/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "nsdecay/config.hpp"
#include "nsdecay/multipliers.hpp"
#include "nsdecay/norm_engine.hpp"
#include "nsdecay/spectral_solver.hpp"

namespace nsdecay {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

InitialDatum mixed_datum(int n) {
  std::vector<double> a(n, 0.3);
  std::vector<Generator> gv;
  for (int k = 0; k < n; ++k) gv.push_back(make_monomial_gaussian(n, (k + 1) % n, 0.8 + 0.1 * k, 1.0 - 0.3 * k));
  return build_datum(DatumMode::dot_H11, shift(make_gaussian(n, 1.0, 1.0), a), gv);
}

std::vector<double> random_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  std::vector<double> w(n);
  double s = 0.0;
  do {
    s = 0.0;
    for (double& x : w) {
      x = g(rng);
      s += x * x;
    }
  } while (s == 0.0);
  for (double& x : w) x /= std::sqrt(s);
  return w;
}

CheckResult gaussian_oracle() {
  QuadratureSpec q;
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n)
    for (double t : {1.0, 10.0, 100.0}) {
      FunctionField f(
          n,
          [t](std::span<const double> xi) {
            double r2 = 0.0;
            for (double x : xi) r2 += x * x;
            return cplx(std::exp(-r2 * t));
          },
          {0.0, t});
      const double v = l2_norm_field(f, q, FrequencyWindow{});
      const double exact = std::pow(std::numbers::pi / (2.0 * t), 0.25 * n);
      worst = std::max(worst, std::abs(v / exact - 1.0));
    }
  return {"gaussian norm closed forms", worst < 1e-8, "max rel err " + sci(worst)};
}

CheckResult sphere_identities() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  QuadratureSpec q;
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += sphere_quadratic_moment(n, k, k);
    worst = std::max(worst, std::abs(sum / sphere_measure(n) - 1.0));
    const AngularRule rule = AngularRule::for_dimension(n, q);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> qv(n);
      for (double& x : qv) x = u(rng);
      for (int k = 0; k < n; ++k) {
        double direct = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) {
          const auto w = rule.node(j);
          double d = 0.0;
          for (int i = 0; i < n; ++i) d += w[i] * qv[i];
          direct += rule.weights[j] * w[k] * w[k] * d * d;
        }
        const double closed = sphere_quartic_moment(n, k, qv);
        worst = std::max(worst, std::abs(direct - closed) / std::max(1e-300, std::abs(closed)));
      }
    }
  }
  return {"sphere moment identities", worst < 1e-8, "max rel err " + sci(worst)};
}

CheckResult exact_identities() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(0.0, 10.0), ur(0.01, 3.0);
  double res = 0.0, kid = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const FluidParams p{1.0, 0.5, 1.3, n};
    const InitialDatum d = mixed_datum(n);
    for (int trial = 0; trial < 40; ++trial) {
      const double t = ut(rng);
      const double r = trial == 0 ? p.degenerate_radius() : ur(rng);
      auto w = random_direction(rng, n);
      std::vector<double> xi(n);
      for (int i = 0; i < n; ++i) xi[i] = r * w[i];
      res = std::max(res, system_residual(p, d, t, xi));
      if (r < 0.99 * p.degenerate_radius()) {
        const SpectralState st = solve(p, d, t, xi);
        const KFamily k = k_family(p, t, r);
        const double hh = std::exp(-p.half_viscous() * r * r * t);
        const cplx srho = d.rho0_scaled(xi);
        std::vector<cplx> sv(n);
        d.v0_scaled(xi, sv);
        cplx wsv = 0.0;
        for (int i = 0; i < n; ++i) wsv += w[i] * sv[i];
        const cplx lhs = st.rho_hat - hh * d.rho0(xi);
        const cplx rhs = k.k0 * srho - cplx(0.0, 1.0) * k.k1 * wsv;
        const double scale = std::abs(st.rho_hat) + std::abs(hh * d.rho0(xi));
        kid = std::max(kid, std::abs(lhs - rhs) / scale);
      }
    }
  }
  return {"system residual and K identity", res < 1e-9 && kid < 1e-10,
          "residual " + sci(res) + ", K identity rel " + sci(kid)};
}

CheckResult moment_bounds() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ur(1e-4, 0.5);
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> a(n, 0.4);
    const double c[] = {1.0, -0.7};
    const Generator parts[] = {shift(make_gaussian(n, 1.0, 1.0), a), make_monomial_gaussian(n, 0, 0.7, 1.3)};
    const Generator g = combine(c, parts);
    const double l11 = weighted_l1_norm(g, 1), l12 = weighted_l1_norm(g, 2);
    for (int trial = 0; trial < 100; ++trial) {
      const double r = ur(rng);
      auto w = random_direction(rng, n);
      std::vector<double> xi(n);
      for (int i = 0; i < n; ++i) xi[i] = r * w[i];
      worst = std::max(worst, std::abs(g.fourier(xi) - g.mean()) / (r * l11));
      worst = std::max(worst, std::abs(moment_expansion_remainder(g, xi)) / (r * r * l12));
    }
  }
  return {"moment expansion bounds", worst <= 1.0, "max ratio " + sci(worst)};
}

CheckResult window_additivity() {
  const FluidParams p{1.0, 1.0, 1.0, 2};
  const InitialDatum d = mixed_datum(2);
  QuadratureSpec q;
  const Quantity which[] = {Quantity::rho_minus_heat, Quantity::v_minus_heat};
  auto sq = [&](Zone z) {
    const auto v = solution_norms(p, d, 1.0, which, q, FrequencyWindow::defaults(p, z));
    return v[0] * v[0] + v[1] * v[1];
  };
  const double total = sq(Zone::all);
  const double parts = sq(Zone::interior) + sq(Zone::bounded) + sq(Zone::exterior);
  const double rel = std::abs(total - parts) / total;
  return {"window additivity", rel < 1e-10, "rel gap " + sci(rel)};
}

CheckResult config_round_trip() {
  const std::string text =
      "command = thm2\nn = 2\nalpha = 0.7\nthetas = 1, 0.25, 0\n[generator.0]\nkind = monomial\naxis = 2\n"
      "width = 1.5\nshift = 0.1, -0.2\n[generator.1]\ncoeff = 0.3\n";
  const ExperimentConfig a = parse_config(text);
  const ExperimentConfig b = parse_config(emit_config(a));
  return {"configuration round trip", a == b && emit_config(a) == emit_config(b), ""};
}

}  // namespace

std::vector<CheckResult> run_selfchecks() {
  std::vector<CheckResult> out;
  auto guarded = [&](const char* name, CheckResult (*fn)()) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };
  guarded("gaussian norm closed forms", gaussian_oracle);
  guarded("sphere moment identities", sphere_identities);
  guarded("system residual and K identity", exact_identities);
  guarded("moment expansion bounds", moment_bounds);
  guarded("window additivity", window_additivity);
  guarded("configuration round trip", config_round_trip);
  return out;
}

}  // namespace nsdecay
