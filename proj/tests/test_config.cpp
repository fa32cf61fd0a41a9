#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsdecay/config.hpp"
#include "nsdecay/errors.hpp"

using namespace nsdecay;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("nsdecay_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_of_error(const std::string& text, const std::vector<std::string>& ov = {}) {
  try {
    parse_config(text, ov);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal configuration fills documented defaults") {
  const ExperimentConfig c = parse_config("command=prop31 n=1");
  CHECK(c.command == Command::prop31);
  CHECK(c.params.n == 1);
  CHECK(c.prop31.c0 == 1.0);
  CHECK(c.prop31.c1 == 1.0);
  CHECK(c.prop31.c2 == 1.0);
  CHECK(c.grid == TimeGrid{1e2, 1e6, 25});
  CHECK(c.params.alpha == 1.0);
  CHECK(c.params.beta == 1.0);
  CHECK(c.params.gamma == 1.0);
  CHECK(c.mode == DatumMode::dot_H11);
  CHECK(c.quad == QuadratureSpec{});
  CHECK(c.generators.empty());
}

TEST_CASE("constraint violations and unknown keys are rejected with their line") {
  CHECK(line_of_error("alpha=-1") == 1);
  try {
    parse_config("n = 2\nalpha = -1\n");
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("alpha must be > 0") != std::string::npos);
  }
  CHECK(line_of_error("n = 1\n\nfoo = 3\n") == 3);
  CHECK(line_of_error("count = ten") == 1);
  CHECK(line_of_error("n = 1.5") == 1);
  CHECK(line_of_error("command = explode") == 1);
  CHECK(line_of_error("# comment\nt0 = 1") == 2);
  CHECK(line_of_error("t0 = 100\nt1 = 50") == 2);
  CHECK(line_of_error("[generator.0]\nwidth = 0") == 2);
  CHECK(line_of_error("[generator.0]\ncolour = red") == 2);
  CHECK(line_of_error("n = 2\n[generator.5]\nkind = gaussian") == 2);
  CHECK(line_of_error("n = 2\n[generator.0]\naxis = 3") == 2);
  CHECK(line_of_error("n = 2\n[generator.0]\nshift = 1") == 2);
  CHECK(line_of_error("[other]\n") == 1);
  CHECK(line_of_error("[generator.0\n") == 1);
  CHECK(line_of_error("novalue\n") == 1);
  CHECK(line_of_error("panels_per_halfperiod = 2") == 1);
  CHECK(line_of_error("", {"alpha=-1"}) == 0);
  CHECK(line_of_error("", {"bogus=1"}) == 0);
  CHECK(line_of_error("", {"noequals"}) == 0);
}

TEST_CASE("comments, sections and overrides") {
  const std::string text =
      "command = thm2   # trailing comment\n"
      "; full-line comment\n"
      "n = 2\n"
      "[generator.0]\n"
      "kind = monomial\n"
      "axis = 2\n"
      "[generator.2]\n"
      "kind = gaussian\n"
      "shift = 0.5, -0.25\n"
      "coeff = -2\n";
  const ExperimentConfig c = parse_config(text, {"alpha=0.5", "t1=1e5"});
  CHECK(c.command == Command::thm2);
  CHECK(c.params.alpha == 0.5);
  CHECK(c.grid.t1 == 1e5);
  REQUIRE(c.generators.size() == 2);
  CHECK(c.generators[0].kind == LeafKind::monomial);
  CHECK(c.generators[0].axis == 2);
  CHECK(c.generators[1].component == 2);
  CHECK(c.generators[1].shift == std::vector<double>{0.5, -0.25});
  CHECK(c.generators[1].coeff == -2.0);

  const InitialDatum d = datum_of(c);
  CHECK(d.dim() == 2);
  CHECK(d.g_rho().mean() == 0.0);
  CHECK(d.g_rho().first_moment()[1] > 0.0);
  CHECK(d.g_v()[0].is_zero());
  CHECK(d.g_v()[1].mean() < 0.0);
}

TEST_CASE("emit and parse round trip") {
  const std::string texts[] = {
      "command=prop31 n=1",
      "command = thm2\nn = 3\nalpha = 0.7\nbeta = 0\ngamma = 2.5\nthetas = 1, 0.25, 0\nquantity = v_minus_profile2\n"
      "zone = interior\nmode = direct\nr_min = 1e-3\nr_max = 4\nrel_tol = 1e-9\nout = somewhere/x\n"
      "[generator.0]\nkind = monomial\naxis = 3\nwidth = 1.5\nshift = 0.1, -0.2, 0.3\n"
      "[generator.1]\ncoeff = 0.3\namplitude = 0.1234567890123456789\n",
      "command = snapshot\nn = 2\nt = 0.5\nh = 0.2\nR = 7\nr = 0.333333333333333333\n"};
  for (const std::string& text : texts) {
    const ExperimentConfig a = parse_config(text);
    const std::string once = emit_config(a);
    const ExperimentConfig b = parse_config(once);
    CHECK(a == b);
    CHECK(emit_config(b) == once);
  }
}

TEST_CASE("default data per command") {
  ExperimentConfig c = parse_config("command = thm1\nn = 2");
  CHECK_FALSE(datum_of(c).b0_vanishes());
  c = parse_config("command = thm2\nn = 2");
  CHECK(datum_of(c).b0_vanishes());
  CHECK(datum_of(c).thresholds().b1 > 0.0);
}

TEST_CASE("run: exit codes and messages") {
  const fs::path dir = scratch_dir("exit");
  std::ostringstream out, err;
  const std::string prefix = (dir / "r").string();

  ExperimentConfig thm2 = parse_config("command=thm2 n=1 t0=100 t1=1e5 count=10", {"out=" + prefix});
  CHECK(run(thm2, {}, out, err) == 0);
  CHECK(out.str().find("[thm2] decay: exponent=-0.25") != std::string::npos);
  CHECK(fs::exists(prefix + "_thm2_decay.csv"));
  CHECK(fs::exists(prefix + "_thm2_refined.csv"));

  out.str("");
  err.str("");
  ExperimentConfig bad = parse_config("command=thm1 n=1 t0=100 t1=1e5 count=10\n[generator.0]\nkind = monomial\n");
  CHECK(run(bad, {false, false}, out, err) == 1);
  CHECK(err.str().find("b0 = 0: use thm2") != std::string::npos);

  err.str("");
  ExperimentConfig gate = parse_config("command=prop31 n=1 t0=100 t1=1e5 count=10 eps0=1e-4");
  CHECK(run(gate, {true, false}, out, err) == 2);

  err.str("");
  ExperimentConfig io = parse_config("command=prop31 n=1 t0=100 t1=1e5 count=10",
                                     {"out=" + (dir / "missing" / "deeper" / "x").string()});
  CHECK(run(io, {true, true}, out, err) == 1);
  CHECK(err.str().rfind("io error:", 0) == 0);

  err.str("");
  ExperimentConfig div = parse_config("command=norm n=1 quantity=pair t0=100 t1=1e5 count=10");
  CHECK(run(div, {true, false}, out, err) == 1);
  CHECK(err.str().rfind("error:", 0) == 0);

  out.str("");
  ExperimentConfig roots = parse_config("command=roots r=1");
  CHECK(run(roots, {}, out, err) == 0);
  CHECK(out.str().find("regime=degenerate") != std::string::npos);

  out.str("");
  ExperimentConfig th = parse_config("command=thresholds n=1");
  CHECK(run(th, {}, out, err) == 0);
  CHECK(out.str().find("b0_vanishes=no") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("identical configurations produce byte-identical files") {
  const fs::path dir = scratch_dir("determinism");
  const std::string texts[] = {"command=prop31 n=2 t0=100 t1=1e5 count=10",
                               "command=thm1 n=2 t0=100 t1=1e5 count=10",
                               "command=sweep n=1 t0=100 t1=1e5 count=10",
                               "command=norm n=3 quantity=pair t0=100 t1=1e5 count=10",
                               "command=snapshot n=1 mode=direct t=1 h=0.2 R=6"};
  int k = 0;
  for (const std::string& text : texts) {
    std::vector<std::string> files[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path sub = dir / (std::to_string(k) + "_" + std::to_string(rep));
      fs::create_directories(sub);
      std::ostringstream out, err;
      const ExperimentConfig c = parse_config(text, {"out=" + (sub / "run").string()});
      CHECK(run(c, {true, true}, out, err) != 1);
      for (const auto& e : fs::directory_iterator(sub)) files[rep].push_back(e.path().filename().string());
      std::sort(files[rep].begin(), files[rep].end());
    }
    REQUIRE(files[0] == files[1]);
    CHECK_FALSE(files[0].empty());
    for (const auto& f : files[0]) {
      const std::string a = slurp(dir / (std::to_string(k) + "_0") / f);
      const std::string b = slurp(dir / (std::to_string(k) + "_1") / f);
      CHECK(a == b);
      if (f.ends_with(".csv")) {
        CHECK(a.rfind("t,value,envelope,ratio\n", 0) == 0);
        // 17 significant digits in scientific notation
        const auto first = a.find('\n') + 1;
        CHECK(a.substr(first, a.find(',', first) - first).size() == std::string("1.0000000000000000e+02").size());
      }
    }
    ++k;
  }
  fs::remove_all(dir);
}

TEST_CASE("selftest command passes") {
  std::ostringstream out, err;
  const ExperimentConfig c = parse_config("command=selftest");
  CHECK(run(c, {}, out, err) == 0);
  CHECK(out.str().find("FAIL") == std::string::npos);
}
