#include "nsdecay/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "nsdecay/errors.hpp"
#include "nsdecay/selfcheck.hpp"
#include "nsdecay/spectral_solver.hpp"

namespace nsdecay {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& v, int line, const std::string& key) {
  double x = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x))
    throw ConfigError(line, "key '" + key + "' expects a real number, got '" + v + "'");
  return x;
}

int parse_int(const std::string& v, int line, const std::string& key) {
  int x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(line, "key '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

std::vector<double> parse_list(const std::string& v, int line, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(item, line, key));
  }
  return out;
}

template <class E>
E parse_enum(const std::string& v, int line, const std::string& key, std::initializer_list<std::pair<const char*, E>> opts) {
  std::string allowed;
  for (const auto& [name, val] : opts) {
    if (v == name) return val;
    allowed += allowed.empty() ? name : std::string("|") + name;
  }
  throw ConfigError(line, "key '" + key + "' expects one of " + allowed + ", got '" + v + "'");
}

const std::initializer_list<std::pair<const char*, Command>> kCommands = {
    {"roots", Command::roots},   {"thresholds", Command::thresholds}, {"norm", Command::norm},
    {"prop31", Command::prop31}, {"thm1", Command::thm1},             {"thm2", Command::thm2},
    {"sweep", Command::sweep},   {"snapshot", Command::snapshot},     {"selftest", Command::selftest}};

const std::initializer_list<std::pair<const char*, Quantity>> kQuantities = {
    {"rho", Quantity::rho},
    {"v", Quantity::v},
    {"pair", Quantity::pair},
    {"rho_minus_heat", Quantity::rho_minus_heat},
    {"v_minus_heat", Quantity::v_minus_heat},
    {"rho_minus_heat_minus_profile", Quantity::rho_minus_heat_minus_profile},
    {"v_minus_heat_minus_profile", Quantity::v_minus_heat_minus_profile},
    {"rho_minus_profile2", Quantity::rho_minus_profile2},
    {"v_minus_profile2", Quantity::v_minus_profile2}};

const std::initializer_list<std::pair<const char*, Zone>> kZones = {
    {"interior", Zone::interior}, {"bounded", Zone::bounded}, {"exterior", Zone::exterior}, {"all", Zone::all}};

const char* zone_name(Zone z) {
  for (const auto& [name, val] : kZones)
    if (val == z) return name;
  return "all";
}

struct Parser {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;  // key -> line, for constraint messages

  void set_global(const std::string& key, const std::string& v, int line) {
    auto& c = cfg;
    auto num = [&] { return parse_double(v, line, key); };
    auto integer = [&] { return parse_int(v, line, key); };
    if (key == "command") c.command = parse_enum(v, line, key, kCommands);
    else if (key == "alpha") c.params.alpha = num();
    else if (key == "beta") c.params.beta = num();
    else if (key == "gamma") c.params.gamma = num();
    else if (key == "n") c.params.n = integer();
    else if (key == "mode") c.mode = parse_enum<DatumMode>(v, line, key, {{"dot_H11", DatumMode::dot_H11}, {"direct", DatumMode::direct}});
    else if (key == "t0") c.grid.t0 = num();
    else if (key == "t1") c.grid.t1 = num();
    else if (key == "count") c.grid.count = integer();
    else if (key == "r_min") c.quad.r_min = num();
    else if (key == "r_max") c.quad.r_max = num();
    else if (key == "panels_per_halfperiod") c.quad.panels_per_halfperiod = integer();
    else if (key == "circle_nodes") c.quad.circle_nodes = integer();
    else if (key == "sphere_degree") c.quad.sphere_degree = integer();
    else if (key == "rel_tol") c.quad.rel_tol = num();
    else if (key == "max_doublings") c.quad.max_doublings = integer();
    else if (key == "c0") c.prop31.c0 = num();
    else if (key == "c1") c.prop31.c1 = num();
    else if (key == "c2") c.prop31.c2 = num();
    else if (key == "eps0") c.prop31.eps0 = num();
    else if (key == "t") c.t = num();
    else if (key == "r") c.r = num();
    else if (key == "quantity") c.quantity = parse_enum(v, line, key, kQuantities);
    else if (key == "zone") c.zone = parse_enum(v, line, key, kZones);
    else if (key == "thetas") c.thetas = parse_list(v, line, key);
    else if (key == "h") c.lattice_h = num();
    else if (key == "R") c.lattice_R = num();
    else if (key == "out") {
      if (v.empty()) throw ConfigError(line, "key 'out' needs a non-empty prefix");
      c.out = v;
    } else throw ConfigError(line, "unknown key '" + key + "'");
    seen[key] = line;
  }

  void set_generator(GeneratorSpec& g, const std::string& key, const std::string& v, int line) {
    if (key == "kind") g.kind = parse_enum<LeafKind>(v, line, key, {{"gaussian", LeafKind::gaussian}, {"monomial", LeafKind::monomial}});
    else if (key == "width") {
      g.width = parse_double(v, line, key);
      if (!(g.width > 0.0)) throw ConfigError(line, "generator width must be > 0");
    } else if (key == "amplitude") g.amplitude = parse_double(v, line, key);
    else if (key == "axis") g.axis = parse_int(v, line, key);
    else if (key == "shift") g.shift = parse_list(v, line, key);
    else if (key == "coeff") g.coeff = parse_double(v, line, key);
    else throw ConfigError(line, "unknown generator key '" + key + "'");
  }

  int line_of(const std::string& key) const {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  }

  void validate(const std::vector<int>& gen_lines) {
    const auto& c = cfg;
    auto need = [&](bool ok, const std::string& key, const std::string& msg) {
      if (!ok) throw ConfigError(line_of(key), msg);
    };
    need(c.params.alpha > 0.0, "alpha", "alpha must be > 0");
    need(c.params.beta >= 0.0, "beta", "beta must be >= 0");
    need(c.params.gamma > 0.0, "gamma", "gamma must be > 0");
    need(c.params.n >= 1, "n", "n must be >= 1");
    need(c.grid.t0 > 1.0, "t0", "t0 must be > 1");
    need(c.grid.t1 > c.grid.t0, "t1", "t1 must exceed t0");
    need(c.grid.count >= 2, "count", "count must be >= 2");
    need(c.t >= 0.0, "t", "t must be >= 0");
    need(c.r > 0.0, "r", "r must be > 0");
    need(c.prop31.c0 > 0.0, "c0", "c0 must be > 0");
    need(c.prop31.c1 > 0.0, "c1", "c1 must be > 0");
    need(c.prop31.c2 > 0.0, "c2", "c2 must be > 0");
    need(c.prop31.eps0 > 0.0, "eps0", "eps0 must be > 0");
    need(c.lattice_h > 0.0, "h", "h must be > 0");
    need(c.lattice_R >= c.lattice_h, "R", "R must be >= h");
    need(!c.thetas.empty(), "thetas", "thetas must not be empty");
    for (double th : c.thetas) need(th >= 0.0, "thetas", "thetas must be >= 0");
    try {
      c.quad.validate();
    } catch (const PreconditionError& e) {
      int line = 0;
      for (const char* k : {"r_min", "r_max", "panels_per_halfperiod", "circle_nodes", "sphere_degree", "rel_tol",
                            "max_doublings"})
        line = std::max(line, line_of(k));
      throw ConfigError(line, e.what());
    }
    for (std::size_t i = 0; i < c.generators.size(); ++i) {
      const auto& g = c.generators[i];
      const int line = gen_lines[i];
      if (g.component < 0 || g.component > c.params.n)
        throw ConfigError(line, "generator component must lie in 0..n");
      if (g.axis < 1 || g.axis > c.params.n) throw ConfigError(line, "generator axis must lie in 1..n");
      if (!g.shift.empty() && static_cast<int>(g.shift.size()) != c.params.n)
        throw ConfigError(line, "generator shift must have n entries");
    }
  }
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

void close_out(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("failed writing '" + path + "'");
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& msg)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : "override: " + msg), line_(line) {}

std::string to_string(Command c) {
  for (const auto& [name, val] : kCommands)
    if (val == c) return name;
  return "?";
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  Parser p;
  std::vector<int> gen_lines;
  int current = -1;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto cut = raw.find_first_of("#;");
    std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "malformed section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name.rfind("generator.", 0) != 0) throw ConfigError(line, "unknown section '" + name + "'");
      GeneratorSpec g;
      g.component = parse_int(name.substr(10), line, "generator index");
      p.cfg.generators.push_back(g);
      gen_lines.push_back(line);
      current = static_cast<int>(p.cfg.generators.size()) - 1;
      continue;
    }
    std::vector<std::string> tokens;
    if (std::count(s.begin(), s.end(), '=') > 1) {
      std::istringstream ts(s);
      std::string tok;
      while (ts >> tok) tokens.push_back(tok);
    } else {
      tokens.push_back(s);
    }
    for (const auto& tok : tokens) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ConfigError(line, "expected key = value, got '" + tok + "'");
      const std::string key = trim(tok.substr(0, eq));
      const std::string val = trim(tok.substr(eq + 1));
      if (key.empty()) throw ConfigError(line, "missing key before '='");
      if (current >= 0)
        p.set_generator(p.cfg.generators[current], key, val, line);
      else
        p.set_global(key, val, line);
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError(0, "expected key=value, got '" + o + "'");
    p.set_global(trim(o.substr(0, eq)), trim(o.substr(eq + 1)), 0);
  }
  p.validate(gen_lines);
  return p.cfg;
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "command = " << to_string(c.command) << '\n';
  os << "alpha = " << num(c.params.alpha) << '\n';
  os << "beta = " << num(c.params.beta) << '\n';
  os << "gamma = " << num(c.params.gamma) << '\n';
  os << "n = " << c.params.n << '\n';
  os << "mode = " << (c.mode == DatumMode::dot_H11 ? "dot_H11" : "direct") << '\n';
  os << "t0 = " << num(c.grid.t0) << '\n';
  os << "t1 = " << num(c.grid.t1) << '\n';
  os << "count = " << c.grid.count << '\n';
  os << "r_min = " << num(c.quad.r_min) << '\n';
  os << "r_max = " << num(c.quad.r_max) << '\n';
  os << "panels_per_halfperiod = " << c.quad.panels_per_halfperiod << '\n';
  os << "circle_nodes = " << c.quad.circle_nodes << '\n';
  os << "sphere_degree = " << c.quad.sphere_degree << '\n';
  os << "rel_tol = " << num(c.quad.rel_tol) << '\n';
  os << "max_doublings = " << c.quad.max_doublings << '\n';
  os << "c0 = " << num(c.prop31.c0) << '\n';
  os << "c1 = " << num(c.prop31.c1) << '\n';
  os << "c2 = " << num(c.prop31.c2) << '\n';
  os << "eps0 = " << num(c.prop31.eps0) << '\n';
  os << "t = " << num(c.t) << '\n';
  os << "r = " << num(c.r) << '\n';
  os << "quantity = " << to_string(c.quantity) << '\n';
  os << "zone = " << zone_name(c.zone) << '\n';
  os << "thetas = " << list(c.thetas) << '\n';
  os << "h = " << num(c.lattice_h) << '\n';
  os << "R = " << num(c.lattice_R) << '\n';
  os << "out = " << c.out << '\n';
  for (const auto& g : c.generators) {
    os << "\n[generator." << g.component << "]\n";
    os << "kind = " << (g.kind == LeafKind::gaussian ? "gaussian" : "monomial") << '\n';
    os << "width = " << num(g.width) << '\n';
    os << "amplitude = " << num(g.amplitude) << '\n';
    os << "axis = " << g.axis << '\n';
    if (!g.shift.empty()) os << "shift = " << list(g.shift) << '\n';
    os << "coeff = " << num(g.coeff) << '\n';
  }
  return os.str();
}

InitialDatum datum_of(const ExperimentConfig& c) {
  const int n = c.params.n;
  std::vector<Generator> comps(n + 1, make_zero(n));
  if (c.generators.empty()) {
    comps[0] = c.command == Command::thm2 ? make_monomial_gaussian(n, 0, 1.0, 1.0) : make_gaussian(n, 1.0, 1.0);
  } else {
    for (const auto& g : c.generators) {
      Generator leaf = g.kind == LeafKind::gaussian ? make_gaussian(n, g.width, g.amplitude)
                                                    : make_monomial_gaussian(n, g.axis - 1, g.width, g.amplitude);
      if (!g.shift.empty()) leaf = shift(leaf, g.shift);
      const double coeffs[] = {1.0, g.coeff};
      const Generator parts[] = {comps[g.component], leaf};
      comps[g.component] = combine(coeffs, parts);
    }
  }
  std::vector<Generator> gv(comps.begin() + 1, comps.end());
  return build_datum(c.mode, comps[0], gv);
}

int run(const ExperimentConfig& c, const RunOptions& opt, std::ostream& out, std::ostream& err) {
  auto say = [&](const std::string& s) {
    if (!opt.quiet) out << s << '\n';
  };
  auto write_csv = [&](const std::string& suffix, const RateReport& r) {
    if (!opt.write_files) return;
    const std::string path = c.out + suffix;
    auto os = open_out(path);
    write_report_csv(os, r);
    close_out(os, path);
  };
  char buf[256];

  try {
    const FluidParams& p = c.params;
    p.validate();
    switch (c.command) {
      case Command::roots: {
        const CharRoots cr = char_roots(p, c.r);
        const char* regime = cr.regime == Regime::oscillatory ? "oscillatory"
                             : cr.regime == Regime::degenerate ? "degenerate"
                                                                : "overdamped";
        std::snprintf(buf, sizeof buf, "r=%.17g r*=%.17g regime=%s", c.r, p.degenerate_radius(), regime);
        say(buf);
        std::snprintf(buf, sizeof buf, "lambda_plus=%.17g%+.17gi lambda_minus=%.17g%+.17gi", cr.lambda_plus.real(),
                      cr.lambda_plus.imag(), cr.lambda_minus.real(), cr.lambda_minus.imag());
        say(buf);
        return 0;
      }
      case Command::thresholds: {
        const InitialDatum d = datum_of(c);
        const Thresholds& th = d.thresholds();
        std::ostringstream os;
        os.precision(17);
        os << "P_rho=" << th.p_rho << "\nP_v=";
        for (double x : th.p_v) os << x << ' ';
        os << "\nQ_rho=";
        for (double x : th.q_rho) os << x << ' ';
        for (std::size_t k = 0; k < th.q_v.size(); ++k) {
          os << "\nQ_v" << k + 1 << '=';
          for (double x : th.q_v[k]) os << x << ' ';
        }
        os << "\nb0=" << th.b0 << " b1=" << th.b1 << " b0_gate=" << d.b0_gate()
           << " b0_vanishes=" << (d.b0_vanishes() ? "yes" : "no");
        say(os.str());
        return 0;
      }
      case Command::norm: {
        const InitialDatum d = datum_of(c);
        const auto times = geometric_time_grid(c.grid.t0, c.grid.t1, c.grid.count);
        std::vector<double> values(times.size());
        const FrequencyWindow w = FrequencyWindow::defaults(p, c.zone);
        parallel_for(times.size(), [&](std::size_t i) { values[i] = solution_norm(p, d, times[i], c.quantity, c.quad, w); });
        const Envelope env = d.b0_vanishes() ? Envelope::power_law(-0.25 * p.n) : Envelope::growth(p.n);
        if (opt.write_files) {
          const std::string path = c.out + "_norm.csv";
          auto os = open_out(path);
          write_norm_table(os, times, values, env);
          close_out(os, path);
        }
        for (std::size_t i = 0; i < times.size(); ++i) {
          std::snprintf(buf, sizeof buf, "t=%.6g %s=%.17g", times[i], to_string(c.quantity).c_str(), values[i]);
          say(buf);
        }
        return 0;
      }
      case Command::prop31: {
        auto [sine, cosd] = run_prop31(p.n, c.prop31, c.grid, c.quad);
        write_csv("_prop31_sine.csv", sine);
        write_csv("_prop31_cosine_difference.csv", cosd);
        say(sine.summary());
        say(cosd.summary());
        return sine.passed() && cosd.passed() ? 0 : 2;
      }
      case Command::thm1:
      case Command::thm2: {
        const InitialDatum d = datum_of(c);
        const bool one = c.command == Command::thm1;
        const TheoremReports r = one ? run_theorem1(p, d, c.grid, c.quad) : run_theorem2(p, d, c.grid, c.quad);
        const std::string tag = one ? "_thm1_" : "_thm2_";
        write_csv(tag + r.main.name + ".csv", r.main);
        write_csv(tag + r.refined.name + ".csv", r.refined);
        say(r.main.summary());
        say(r.refined.summary());
        return r.main.passed() && r.refined.passed() ? 0 : 2;
      }
      case Command::sweep: {
        const SweepResult s = run_threshold_sweep(p, c.thetas, c.grid, c.quad);
        bool ok = true;
        std::snprintf(buf, sizeof buf, "[sweep] growth component exponent=%.5f, decay component exponent=%.5f",
                      s.growth_component.exponent, s.decay_component.exponent);
        say(buf);
        for (std::size_t i = 0; i < s.entries.size(); ++i) {
          const auto& e = s.entries[i];
          write_csv("_sweep_" + std::to_string(i) + ".csv", e.report);
          std::snprintf(buf, sizeof buf, " b0=%.6g crossing_T=%.6g", e.b0, e.crossing_time);
          say(e.report.summary() + buf);
          ok = ok && e.report.passed();
        }
        return ok ? 0 : 2;
      }
      case Command::snapshot: {
        const InitialDatum d = datum_of(c);
        const GridSnapshot s = synthesize_grid_field(p, d, c.t, c.lattice_h, c.lattice_R);
        for (const auto& w : s.warnings) err << "warning: " << w << '\n';
        if (opt.write_files) {
          const std::string path = c.out + "_snapshot.txt";
          auto os = open_out(path);
          write_snapshot(os, s);
          close_out(os, path);
        }
        std::snprintf(buf, sizeof buf, "[snapshot] n=%d points=%zu (approximate synthesis)", s.n, s.rho.size());
        say(buf);
        return 0;
      }
      case Command::selftest: {
        bool ok = true;
        for (const auto& r : run_selfchecks()) {
          say(std::string(r.passed ? "PASS " : "FAIL ") + r.name + (r.detail.empty() ? "" : ": " + r.detail));
          ok = ok && r.passed;
        }
        return ok ? 0 : 2;
      }
    }
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace nsdecay
