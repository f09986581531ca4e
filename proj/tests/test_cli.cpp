#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "logsob/cli.hpp"

using namespace logsob;

namespace {

struct Captured {
  int code;
  std::string out;
};

// Runs the CLI binary through the shell and captures stdout.
Captured shell(const std::string& args) {
  const std::string cmd = std::string(LOGSOB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig cfg;
  cfg.alpha = 1.25;
  cfg.lam_grid = {0.5, 2.0};
  cfg.seed = 99;
  cfg.statistic = "sqrt_n";
  const auto back = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
  CHECK(back.alpha == 1.25);
  CHECK(back.seed == 99);
  CHECK(back.lam_grid == std::vector<double>{0.5, 2.0});
  // absent keys keep their defaults
  const auto partial = config_from_json(R"({"alpha": 1.7})");
  CHECK(partial.alpha == 1.7);
  CHECK(partial.family == "power");
  CHECK(partial.trials == RunConfig{}.trials);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_from_json(R"({"alpah": 1.7})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"alpha": "big"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"trials": 1.5})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"trials": -3})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(config_from_json("{not json"), ConfigError);
}

TEST_CASE("overrides") {
  RunConfig cfg;
  apply_override(cfg, "alpha=1.8");
  apply_override(cfg, "family=power_log");
  apply_override(cfg, "lam_grid=[1,2,3]");
  CHECK(cfg.alpha == 1.8);
  CHECK(cfg.family == "power_log");
  CHECK(cfg.lam_grid == std::vector<double>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(apply_override(cfg, "alpha"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "nope=1"), ConfigError);
}

TEST_CASE("hash ignores threads and output directory") {
  RunConfig a, b;
  b.threads = 7;
  b.output_dir = "/tmp/elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("check-h passes for |x|^1.5 with eps = 1/2 and M = 1") {
  RunConfig cfg;
  cfg.epsilon = 0.5;
  cfg.big_m = 1.0;
  std::ostringstream out, err;
  CHECK(run("check-h", cfg, out, err) == 0);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j.at("schema_version") == kSchemaVersion);
  CHECK(j.at("config_hash") == config_hash(cfg));
  CHECK(err.str().empty());
}

TEST_CASE("lemmas on the Laplace potential fail with an error line") {
  RunConfig cfg;
  cfg.alpha = 1.0;
  std::ostringstream out, err;
  const int code = run("lemmas", cfg, out, err);
  CHECK(code == 2);
  const auto j = nlohmann::json::parse(err.str());
  CHECK(j.at("error") == "precondition");
  CHECK(j.contains("message"));
}

TEST_CASE("unknown subcommand") {
  std::ostringstream out, err;
  CHECK(run("frobnicate", RunConfig{}, out, err) == 2);
  CHECK(shell("frobnicate").code == 2);
}

TEST_CASE("concentration output is a function of the config and seed") {
  RunConfig cfg;
  cfg.seed = 7;
  cfg.trials = 2000;
  cfg.n = 10;
  std::ostringstream o1, o2, e1, e2;
  CHECK(run("concentration", cfg, o1, e1) == 0);
  cfg.threads = 3;
  CHECK(run("concentration", cfg, o2, e2) == 0);
  CHECK(o1.str() == o2.str());
  CHECK_FALSE(o1.str().empty());
}

TEST_CASE("binary output does not depend on LOGSOB_THREADS") {
  const std::string args = "concentration -s seed=7 -s trials=2000";
  const auto a = shell("");  // usage error without a subcommand
  CHECK(a.code == 2);
  const auto one = shell(std::string("") + args);
  setenv("LOGSOB_THREADS", "4", 1);
  const auto four = shell(args);
  unsetenv("LOGSOB_THREADS");
  CHECK(one.code == 0);
  CHECK(four.code == 0);
  CHECK(one.out == four.out);
  const auto s1 = shell("sample -s samples=50 -s seed=3");
  const auto s2 = shell("sample -s samples=50 -s seed=3");
  CHECK(s1.code == 0);
  CHECK(s1.out == s2.out);
  CHECK(s1.out.rfind("# logsob sample schema_version=1", 0) == 0);
}

TEST_CASE("binary reports config errors") {
  CHECK(shell("check-h -s nope=1").code == 2);
  CHECK(shell("check-h -c /nonexistent/config.json").code == 2);
  const auto cfg = shell("config -s alpha=1.25");
  CHECK(cfg.code == 0);
  CHECK(nlohmann::json::parse(cfg.out).at("alpha") == 1.25);
}
