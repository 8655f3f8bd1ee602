// Command-line front end:
//   eqm <simulate|transform|classify|verify> [--config FILE] [--key value ...] --out PATH

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "eqm/cli/config.hpp"
#include "eqm/cli/run.hpp"
#include "eqm/error.hpp"

int main(int argc, char** argv) {
  using namespace eqm::cli;

  CLI::App app{"Bernstein process toolkit: simulate, transform, classify, verify"};
  std::string command;
  std::string config_file;
  app.add_option("command", command, "simulate | transform | classify | verify")
      ->required()
      ->check(CLI::IsMember({"simulate", "transform", "classify", "verify"}));
  app.add_option("--config", config_file, "flat key=value configuration file");

  std::map<std::string, std::string> flags;
  for (auto key : known_keys()) {
    if (key == "command") continue;
    const std::string k(key);
    app.add_option("--" + k, flags[k], "overrides '" + k + "' from the config file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }

  try {
    std::string text;
    if (!config_file.empty()) {
      std::ifstream is(config_file, std::ios::binary);
      if (!is) throw eqm::IoError("cannot read config file '" + config_file + "'");
      std::ostringstream ss;
      ss << is.rdbuf();
      text = ss.str();
    }
    std::vector<Override> overrides{{"command", command}};
    for (const auto& [key, value] : flags) {
      if (app.count("--" + key) > 0) overrides.emplace_back(key, value);
    }
    const RunConfig cfg = parse_config(text, overrides);
    if (cfg.out.empty()) throw ConfigError("missing required key 'out' (pass --out PATH)");
    const int status = run(cfg);
    if (status == kVerificationFailure) std::cerr << "verification failed; see " << json_path(cfg.out) << '\n';
    return status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_status_for(e);
  }
}
