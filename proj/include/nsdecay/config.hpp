#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsdecay/catalog.hpp"
#include "nsdecay/core_model.hpp"
#include "nsdecay/norm_engine.hpp"
#include "nsdecay/rate_lab.hpp"

namespace nsdecay {

enum class Command { roots, thresholds, norm, prop31, thm1, thm2, sweep, snapshot, selftest };

std::string to_string(Command c);

/// One [generator.N] section. component 0 is g_rho, component k >= 1 is g_v^(k).
/// axis is 1-based as written in the configuration text.
struct GeneratorSpec {
  int component = 0;
  LeafKind kind = LeafKind::gaussian;
  double width = 1.0;
  double amplitude = 1.0;
  int axis = 1;
  std::vector<double> shift;
  double coeff = 1.0;

  bool operator==(const GeneratorSpec&) const = default;
};

struct ExperimentConfig {
  Command command = Command::selftest;
  FluidParams params;
  DatumMode mode = DatumMode::dot_H11;
  std::vector<GeneratorSpec> generators;  // empty: the command's default datum
  TimeGrid grid;
  QuadratureSpec quad;
  Prop31Options prop31;
  double t = 1.0;              // norm at a single time when grid is not used; snapshot time
  double r = 0.5;              // radius for roots
  Quantity quantity = Quantity::pair;
  Zone zone = Zone::all;
  std::vector<double> thetas{1.0, 0.1, 0.0};
  double lattice_h = 0.1;      // snapshot frequency spacing
  double lattice_R = 10.0;     // snapshot frequency cutoff
  std::string out = "nsdecay";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parse failure with the 1-based line it refers to (0 for command-line overrides).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses the flat `key = value` format with optional [generator.N] sections and applies
/// the overrides (each `key=value`) afterwards. Unknown keys and invalid values are rejected.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& c);

/// The datum described by the generator sections, or the command's default when there are none:
/// a gaussian g_rho for thm1 and most commands, an axis-1 monomial-gaussian g_rho for thm2.
InitialDatum datum_of(const ExperimentConfig& c);

struct RunOptions {
  bool quiet = false;
  bool write_files = true;
};

/// Executes the experiment. Returns 0 when every gate passes, 2 when a gate fails and 1 on
/// execution errors (messages go to err; I/O errors are prefixed "io error:").
int run(const ExperimentConfig& c, const RunOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace nsdecay
