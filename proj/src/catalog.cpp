#include "nsdecay/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nsdecay/errors.hpp"

namespace nsdecay {

namespace {

constexpr double kPi = std::numbers::pi;

double binomial(int s, int m) {
  double c = 1.0;
  for (int i = 1; i <= m; ++i) c = c * (s - m + i) / i;
  return c;
}

// int_0^inf r^k exp(-r^2/w^2) dr
double radial_gauss_moment(int k, double w) {
  return 0.5 * std::pow(w, k + 1) * std::tgamma(0.5 * (k + 1));
}

// int_{S^{n-1}} |w_j| dsigma
double sphere_abs_moment(int n) {
  return 2.0 * std::pow(kPi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n + 1));
}

double leaf_weighted_norm(const GeneratorTerm& t, int n, int s) {
  double acc = 0.0;
  for (int m = 0; m <= s; ++m) {
    if (t.kind == LeafKind::gaussian)
      acc += binomial(s, m) * radial_gauss_moment(m + n - 1, t.width);
    else
      acc += binomial(s, m) * radial_gauss_moment(m + n, t.width);
  }
  const double angular = t.kind == LeafKind::gaussian ? sphere_measure(n) : sphere_abs_moment(n);
  return std::abs(t.amplitude) * angular * acc;
}

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

void check_leaf(int n, double width) {
  if (n < 1) throw PreconditionError("generator dimension must be >= 1");
  if (!(width > 0.0)) throw PreconditionError("generator width must be > 0");
}

// Merges summands of identical shape and drops zero coefficients.
std::vector<GeneratorTerm> normalize(std::vector<GeneratorTerm> terms) {
  std::vector<GeneratorTerm> out;
  for (auto& t : terms) {
    auto it = std::find_if(out.begin(), out.end(), [&](const GeneratorTerm& o) { return o.same_shape(t); });
    if (it == out.end())
      out.push_back(std::move(t));
    else
      it->amplitude += t.amplitude;
  }
  std::erase_if(out, [](const GeneratorTerm& t) { return t.amplitude == 0.0; });
  return out;
}

const char* tag_name(GeneratorTag tag) {
  switch (tag) {
    case GeneratorTag::zero: return "zero";
    case GeneratorTag::gaussian: return "gaussian";
    case GeneratorTag::monomial_gaussian: return "monomial_gaussian";
    case GeneratorTag::shifted: return "shifted";
    case GeneratorTag::scaled: return "scaled";
    case GeneratorTag::sum: return "sum";
  }
  return "?";
}

}  // namespace

Generator::Generator(int n, GeneratorTag tag, std::vector<GeneratorTerm> terms)
    : n_(n), tag_(tag), terms_(normalize(std::move(terms))), first_moment_(n, 0.0) {
  if (terms_.empty()) tag_ = GeneratorTag::zero;
  for (const auto& t : terms_) {
    const double mass = t.amplitude * std::pow(t.width * std::sqrt(kPi), n);
    leaf_mass_.push_back(mass);
    if (t.kind == LeafKind::gaussian) {
      mean_ += mass;
      for (int i = 0; i < n; ++i) first_moment_[i] += t.shift[i] * mass;
    } else {
      first_moment_[t.axis] += mass * t.width * t.width * 0.5;
    }
  }
}

cplx Generator::fourier(std::span<const double> xi) const {
  cplx acc{0.0, 0.0};
  double r2 = 0.0;
  for (int i = 0; i < n_; ++i) r2 += xi[i] * xi[i];
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& t = terms_[k];
    const double w2 = t.width * t.width;
    const double env = leaf_mass_[k] * std::exp(-0.25 * w2 * r2);
    cplx leaf = t.kind == LeafKind::gaussian ? cplx{env, 0.0} : cplx{0.0, -env * 0.5 * w2 * xi[t.axis]};
    double phase = 0.0;
    for (int i = 0; i < n_; ++i) phase += t.shift[i] * xi[i];
    if (phase != 0.0) leaf *= cplx{std::cos(phase), -std::sin(phase)};
    acc += leaf;
  }
  return acc;
}

double Generator::value(std::span<const double> x) const {
  double acc = 0.0;
  for (const auto& t : terms_) {
    double r2 = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double y = x[i] - t.shift[i];
      r2 += y * y;
    }
    double v = t.amplitude * std::exp(-r2 / (t.width * t.width));
    if (t.kind == LeafKind::monomial) v *= x[t.axis] - t.shift[t.axis];
    acc += v;
  }
  return acc;
}

double Generator::weighted_norm_bound(int s) const {
  if (s < 0) throw PreconditionError("weight exponent must be >= 0");
  double acc = 0.0;
  for (const auto& t : terms_)
    acc += std::pow(1.0 + norm2(t.shift), s) * leaf_weighted_norm(t, n_, s);
  return acc;
}

bool Generator::weighted_norm_is_exact() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && norm2(terms_[0].shift) == 0.0;
}

double Generator::spectral_radius() const {
  double r = 0.0;
  for (const auto& t : terms_) r = std::max(r, std::sqrt(4.0 * 42.0) / t.width);
  return r;
}

std::string Generator::describe() const {
  std::ostringstream os;
  os << tag_name(tag_) << "(n=" << n_;
  for (const auto& t : terms_) {
    os << "; " << (t.kind == LeafKind::gaussian ? "gauss" : "mono") << " a=" << t.amplitude << " w=" << t.width;
    if (t.kind == LeafKind::monomial) os << " axis=" << t.axis;
    if (norm2(t.shift) != 0.0) {
      os << " shift=(";
      for (int i = 0; i < n_; ++i) os << (i ? "," : "") << t.shift[i];
      os << ")";
    }
  }
  os << ")";
  return os.str();
}

Generator make_zero(int n) {
  if (n < 1) throw PreconditionError("generator dimension must be >= 1");
  return Generator(n, GeneratorTag::zero, {});
}

Generator make_gaussian(int n, double width, double amplitude) {
  check_leaf(n, width);
  return Generator(n, GeneratorTag::gaussian,
                   {GeneratorTerm{LeafKind::gaussian, 0, width, amplitude, std::vector<double>(n, 0.0)}});
}

Generator make_monomial_gaussian(int n, int axis, double width, double amplitude) {
  check_leaf(n, width);
  if (axis < 0 || axis >= n) throw PreconditionError("monomial axis out of range");
  return Generator(n, GeneratorTag::monomial_gaussian,
                   {GeneratorTerm{LeafKind::monomial, axis, width, amplitude, std::vector<double>(n, 0.0)}});
}

Generator shift(const Generator& g, std::span<const double> a) {
  if (static_cast<int>(a.size()) != g.dim()) throw PreconditionError("shift vector length must equal n");
  std::vector<GeneratorTerm> terms(g.terms().begin(), g.terms().end());
  for (auto& t : terms)
    for (int i = 0; i < g.dim(); ++i) t.shift[i] += a[i];
  return Generator(g.dim(), GeneratorTag::shifted, std::move(terms));
}

Generator scale(const Generator& g, double s) {
  std::vector<GeneratorTerm> terms(g.terms().begin(), g.terms().end());
  for (auto& t : terms) t.amplitude *= s;
  return Generator(g.dim(), GeneratorTag::scaled, std::move(terms));
}

Generator combine(std::span<const double> coeffs, std::span<const Generator> gs) {
  if (gs.empty()) throw PreconditionError("combine needs at least one generator");
  if (coeffs.size() != gs.size()) throw PreconditionError("combine needs one coefficient per generator");
  const int n = gs[0].dim();
  std::vector<GeneratorTerm> terms;
  for (std::size_t k = 0; k < gs.size(); ++k) {
    if (gs[k].dim() != n) throw PreconditionError("combine: dimension mismatch");
    for (auto t : gs[k].terms()) {
      t.amplitude *= coeffs[k];
      terms.push_back(std::move(t));
    }
  }
  return Generator(n, GeneratorTag::sum, std::move(terms));
}

Generator permute_axes(const Generator& g, std::span<const int> perm) {
  const int n = g.dim();
  if (static_cast<int>(perm.size()) != n) throw PreconditionError("permutation length must equal n");
  std::vector<int> inverse(n, -1);
  for (int i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n || inverse[perm[i]] != -1) throw PreconditionError("not a permutation");
    inverse[perm[i]] = i;
  }
  std::vector<GeneratorTerm> terms(g.terms().begin(), g.terms().end());
  for (auto& t : terms) {
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[perm[i]] = t.shift[i];
    t.shift = std::move(s);
    t.axis = perm[t.axis];
  }
  return Generator(n, g.tag(), std::move(terms));
}

cplx moment_expansion_remainder(const Generator& g, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != g.dim()) throw PreconditionError("frequency length must equal n");
  double dot = 0.0;
  const auto q = g.first_moment();
  for (int i = 0; i < g.dim(); ++i) dot += xi[i] * q[i];
  return g.fourier(xi) - g.mean() - kMomentPhase * dot;
}

double weighted_l1_norm(const Generator& g, int s) {
  if (s < 0) throw PreconditionError("weight exponent must be >= 0");
  if (g.weighted_norm_is_exact()) return g.weighted_norm_bound(s);

  using boost::math::quadrature::gauss_kronrod;
  const int n = g.dim();
  double reach = 0.0;
  std::vector<double> lo(n, 0.0), hi(n, 0.0);
  for (const auto& t : g.terms()) reach = std::max(reach, 7.5 * t.width);
  for (int i = 0; i < n; ++i) {
    for (const auto& t : g.terms()) {
      lo[i] = std::min(lo[i], t.shift[i] - reach);
      hi[i] = std::max(hi[i], t.shift[i] + reach);
    }
  }

  std::vector<double> x(n, 0.0);
  double worst_err = 0.0;
  constexpr double kTol = 1e-10;
  // Nested adaptive Gauss-Kronrod, innermost axis last. Each axis is split at 0, where the
  // weight (1+|x|)^s has a kink, and at the zero planes of monomial factors. The innermost
  // axis is also split at sign changes of g.
  std::function<double(int)> level = [&](int axis) -> double {
    auto f = [&](double xa) {
      x[axis] = xa;
      if (axis + 1 < n) return level(axis + 1);
      return std::pow(1.0 + norm2(x), s) * std::abs(g.value(x));
    };
    std::vector<double> cuts{lo[axis], hi[axis]};
    if (lo[axis] < 0.0 && 0.0 < hi[axis]) cuts.push_back(0.0);
    for (const auto& t : g.terms())
      if (t.kind == LeafKind::monomial && t.axis == axis && lo[axis] < t.shift[axis] && t.shift[axis] < hi[axis])
        cuts.push_back(t.shift[axis]);
    if (axis + 1 == n) {
      auto signed_value = [&](double xa) {
        x[axis] = xa;
        return g.value(x);
      };
      constexpr int kScan = 256;
      const double step = (hi[axis] - lo[axis]) / kScan;
      double a = lo[axis], fa = signed_value(a);
      for (int i = 1; i <= kScan; ++i) {
        const double b = lo[axis] + i * step, fb = signed_value(b);
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
          double l = a, r = b, fl = fa;
          for (int it = 0; it < 60 && r - l > 1e-15 * (1.0 + std::abs(l)); ++it) {
            const double m = 0.5 * (l + r), fm = signed_value(m);
            if ((fm < 0.0) == (fl < 0.0)) {
              l = m;
              fl = fm;
            } else {
              r = m;
            }
          }
          cuts.push_back(0.5 * (l + r));
        }
        a = b;
        fa = fb;
      }
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
      if (cuts[piece + 1] <= cuts[piece]) continue;
      double err = 0.0;
      total += gauss_kronrod<double, 21>::integrate(f, cuts[piece], cuts[piece + 1], 15, kTol, &err);
      worst_err = std::max(worst_err, err);
    }
    return total;
  };
  const double value = level(0);
  const double rel = value > 0.0 ? worst_err / value : worst_err;
  if (rel > 1e-8) throw QuadratureError("weighted_l1_norm: adaptive quadrature did not reach 1e-8", value, rel);
  return value;
}

InitialDatum::InitialDatum(DatumMode mode, Generator g_rho, std::vector<Generator> g_v, Thresholds th)
    : mode_(mode), g_rho_(std::move(g_rho)), g_v_(std::move(g_v)), thresholds_(std::move(th)) {
  double mass = g_rho_.weighted_norm_bound(0);
  for (const auto& g : g_v_) mass += g.weighted_norm_bound(0);
  b0_gate_ = 1e-12 * (1.0 + mass);
}

cplx InitialDatum::rho0(std::span<const double> xi) const {
  const cplx g = g_rho_.fourier(xi);
  if (mode_ == DatumMode::direct) return g;
  const double r = norm2(xi);
  if (r == 0.0) throw PreconditionError("dot_H11 datum is not defined at xi = 0");
  return g / r;
}

void InitialDatum::v0(std::span<const double> xi, std::span<cplx> out) const {
  const double r = mode_ == DatumMode::direct ? 1.0 : norm2(xi);
  if (r == 0.0) throw PreconditionError("dot_H11 datum is not defined at xi = 0");
  for (std::size_t k = 0; k < g_v_.size(); ++k) out[k] = g_v_[k].fourier(xi) / r;
}

cplx InitialDatum::rho0_scaled(std::span<const double> xi) const {
  const cplx g = g_rho_.fourier(xi);
  return mode_ == DatumMode::direct ? g * norm2(xi) : g;
}

void InitialDatum::v0_scaled(std::span<const double> xi, std::span<cplx> out) const {
  const double r = mode_ == DatumMode::direct ? norm2(xi) : 1.0;
  for (std::size_t k = 0; k < g_v_.size(); ++k) out[k] = g_v_[k].fourier(xi) * r;
}

bool InitialDatum::b0_vanishes() const { return std::abs(thresholds_.b0) < b0_gate_; }

bool InitialDatum::velocity_is_zero() const {
  return std::all_of(g_v_.begin(), g_v_.end(), [](const Generator& g) { return g.is_zero(); });
}

double InitialDatum::spectral_radius() const {
  double r = g_rho_.spectral_radius();
  for (const auto& g : g_v_) r = std::max(r, g.spectral_radius());
  return r;
}

namespace {

Thresholds moment_thresholds(DatumMode mode, const Generator& g_rho, const std::vector<Generator>& g_v) {
  const int n = g_rho.dim();
  if (mode == DatumMode::direct) {
    // |D| rho0 has symbol |xi| g^, which vanishes at the origin and has no first moment.
    return make_thresholds(0.0, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                           std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  }
  std::vector<double> p_v(n);
  std::vector<std::vector<double>> q_v(n);
  for (int k = 0; k < n; ++k) {
    p_v[k] = g_v[k].mean();
    q_v[k].assign(g_v[k].first_moment().begin(), g_v[k].first_moment().end());
  }
  return make_thresholds(g_rho.mean(), std::move(p_v),
                         std::vector<double>(g_rho.first_moment().begin(), g_rho.first_moment().end()),
                         std::move(q_v));
}

}  // namespace

InitialDatum build_datum(DatumMode mode, Generator g_rho, std::vector<Generator> g_v) {
  const int n = g_rho.dim();
  if (n < 1) throw PreconditionError("datum needs a generator for rho");
  if (static_cast<int>(g_v.size()) != n) throw PreconditionError("datum needs n velocity generators");
  for (const auto& g : g_v)
    if (g.dim() != n) throw PreconditionError("datum generators must share the dimension");
  Thresholds th = moment_thresholds(mode, g_rho, g_v);
  return InitialDatum(mode, std::move(g_rho), std::move(g_v), std::move(th));
}

Thresholds thresholds_of(const InitialDatum& d) { return moment_thresholds(d.mode(), d.g_rho(), d.g_v()); }

}  // namespace nsdecay
