// Command-line front end for the decay-rate experiments.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nsdecay/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decay-rate experiments for the linearized compressible Navier-Stokes system"};
  std::string config_path, out_prefix, command;
  std::vector<std::string> overrides, positional;
  bool quiet = false;
  app.add_option("--config", config_path, "configuration file (key = value, [generator.N] sections)");
  app.add_option("--out", out_prefix, "output path prefix for CSV and snapshot files");
  app.add_option("--override", overrides, "key=value applied after the configuration file")->take_all();
  app.add_flag("--quiet", quiet, "suppress the summary on standard output");
  app.add_option("command", command, "roots|thresholds|norm|prop31|thm1|thm2|sweep|snapshot|selftest");
  app.add_option("settings", positional, "additional key=value settings");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  std::string text;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "io error: cannot read '" << config_path << "'\n";
      return 1;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  std::vector<std::string> settings;
  if (!command.empty()) {
    if (command.find('=') != std::string::npos)
      settings.push_back(command);
    else
      settings.push_back("command=" + command);
  }
  settings.insert(settings.end(), positional.begin(), positional.end());
  settings.insert(settings.end(), overrides.begin(), overrides.end());
  if (!out_prefix.empty()) settings.push_back("out=" + out_prefix);

  nsdecay::ExperimentConfig cfg;
  try {
    cfg = nsdecay::parse_config(text, settings);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return nsdecay::run(cfg, {quiet, true}, std::cout, std::cerr);
}
