#pragma once

// Configuration and subcommand dispatch for the logsob command line tool.
// Every artifact is a function of (config, seed) only; the thread count
// and output directory are excluded from the config hash.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace logsob {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  // potential: "power", "power_log" or "tabulated" (reads `table`)
  std::string family = "power";
  double alpha = 1.5;
  double beta = 1.0;  // power_log exponent of log(e + |x|)
  std::string table;

  // growth hypothesis; <= 0 picks the family default
  double epsilon = 0.0;
  double big_m = 0.0;

  // cost H: quadratic on [0, D], Phi*(B x) beyond; D follows from B
  double b_const = 1.0;

  // quadrature
  std::size_t intervals = 2048;
  int grading_levels = 30;
  double target_rel_error = 1e-10;
  double truncation_offset = 40.0;

  // transform grid on [0, grid_max]
  double grid_max = 10.0;
  std::size_t grid_points = 201;

  // lsi-scan
  std::string form = "modified";
  int refinement = 0;
  double a_restricted = 1.0;
  double kappa = 0.0;

  // lemmas
  double lam = 1.0;
  double c_h = 0.0;  // <= 0: upper Barthe-Roberto bracket
  double cap = 1e6;

  // concentration: f = clamp(x, -clamp, clamp); a_const <= 0 takes the
  // best ratio of the modified form over exponential tilts
  std::size_t n = 10;
  std::size_t trials = 10000;
  double clamp = 5.0;
  std::string statistic = "mean";
  std::vector<double> lam_grid = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0};
  double a_const = 0.0;

  // sample
  std::size_t samples = 1000;

  std::uint64_t seed = 1;
  unsigned threads = 0;    // 0: LOGSOB_THREADS, else available parallelism
  std::string output_dir;  // empty: artifacts go to the output stream
};

/// Pretty JSON with every field in declaration order.
std::string config_to_json(const RunConfig& cfg);

/// Parses a JSON object; absent keys keep their defaults, unknown keys and
/// wrongly typed values throw ConfigError.
RunConfig config_from_json(std::string_view text);

/// Overrides one field from "key=value"; the value is read as JSON when it
/// parses, else as a string.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// FNV-1a hash of the config without threads and output_dir, as 16 hex
/// digits.
std::string config_hash(const RunConfig& cfg);

const std::vector<std::string>& subcommands();

/// Runs a subcommand. Returns 0 when every check passes, 1 when a check
/// fails, 2 on usage, config or precondition errors and 3 on numerical
/// failures; errors are a single JSON line on `err`.
int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out,
        std::ostream& err);

}  // namespace logsob
