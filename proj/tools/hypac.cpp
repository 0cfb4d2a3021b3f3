// hypac: generate | geometry | isoperimetry | solve | verify <config.yaml> [-o dir]
#include <cstdlib>
#include <iostream>
#include <utility>

#include "CLI11.hpp"
#include "hypac/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Allen-Cahn minimisers on truncated hyperbolic graphs"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  const std::pair<const char*, const char*> commands[] = {
      {"generate", "build the graph and write its edges and disk embedding"},
      {"geometry", "estimate delta, lambda and shadow constants"},
      {"isoperimetry", "ball growth, doubling covers and the isoperimetric scan"},
      {"solve", "exhaustion solves, asymptotics probes and the derived constants"},
      {"verify", "run every property check and report PASS/FAIL"}};
  for (auto [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "YAML run config")->required();
    sub->add_option("-o,--output", out_dir, "output directory (overrides config and HYPAC_OUTPUT_DIR)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto cfg = hypac::load_config(config_path);
    if (const char* w = std::getenv("HYPAC_WORKERS")) cfg.workers = std::atoi(w);
    if (out_dir.empty()) {
      if (const char* d = std::getenv("HYPAC_OUTPUT_DIR")) out_dir = d;
      else out_dir = cfg.output.directory;
    }
    return hypac::run_command(command, cfg, out_dir, std::cout);
  } catch (const hypac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
