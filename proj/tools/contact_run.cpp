// Command-line experiment runner.
//
//   contact_run run      --config exp.cfg --out results/ [--override key=value]... [--quiet]
//   contact_run section  ...
//   contact_run converge ...
//   contact_run errors   ...
//   contact_run keys
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical divergence.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contact/harness/experiment.hpp"

namespace harness = contact::harness;

int main(int argc, char** argv) {
  CLI::App app{"Contact-geometric integrators: trajectories, sections, convergence and error studies"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  bool quiet = false;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", "integrate and write trajectory.csv (and section.csv when section.period is set)"},
      {"section", "integrate and write the stroboscopic section only"},
      {"converge", "final-state error over converge.taus and the fitted order"},
      {"errors", "numerical error against the modified-Hamiltonian estimate (contact-s2)"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (created if missing)");
    sub->add_option("--override", overrides, "key=value applied after the file; repeatable");
    sub->add_flag("--quiet", quiet, "print nothing on success");
  }
  app.add_subcommand("keys", "print the configuration key reference, models and integrators");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : harness::kExitConfig;
  }

  auto* chosen = app.get_subcommands().front();
  if (chosen->get_name() == "keys") {
    std::cout << harness::config_reference_text();
    return 0;
  }

  harness::RunReport report;
  try {
    auto file = harness::ConfigFile::load(config_path);
    for (const auto& o : overrides) file.apply_override(o);
    report = harness::execute(chosen->get_name(), file, out_dir);
  } catch (const harness::ConfigError& e) {
    report.exit_code = harness::kExitConfig;
    report.message = e.what();
  }

  if (report.exit_code != harness::kExitOk) {
    std::cerr << "contact_run: " << report.message << "\n";
  } else if (!quiet) {
    if (!report.message.empty()) std::cout << report.message << "\n";
    for (const auto& f : report.files) std::cout << "wrote " << f << "\n";
  }
  return report.exit_code;
}
