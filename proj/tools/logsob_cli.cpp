#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logsob/cli.hpp"

namespace {

void fail(const std::string& kind, const std::string& msg) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = msg;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for modified log-Sobolev inequalities"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "JSON config file");
  app.add_option("-s,--set", overrides, "Override a config key: key=value")->take_all();
  // subcommands inherit fallthrough, so set it before adding them
  app.fallthrough();
  app.add_subcommand("config", "Print the effective config as JSON");
  for (const auto& name : logsob::subcommands()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("usage", e.what());
    return 2;
  }

  logsob::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw logsob::ConfigError("cannot read config " + config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = logsob::config_from_json(ss.str());
    }
    for (const auto& o : overrides) logsob::apply_override(cfg, o);
  } catch (const logsob::ConfigError& e) {
    fail("config", e.what());
    return 2;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  if (sub == "config") {
    std::cout << logsob::config_to_json(cfg);
    return 0;
  }
  return logsob::run(sub, cfg, std::cout, std::cerr);
}
