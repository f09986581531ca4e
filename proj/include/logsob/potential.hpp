#pragma once

// Symmetric convex potentials on the real line and the growth hypothesis
// (1 + eps) Phi(x) <= x Phi'(x) <= (2 - eps) Phi(x) for x >= M.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "logsob/numerics.hpp"

namespace logsob {

enum class Family { power, power_log, custom };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// Immutable symmetric potential Phi with its first derivative and an
/// optional second derivative. The minimum sits at x = 0.
class Potential {
 public:
  Potential(ScalarMap value, ScalarMap deriv, std::optional<ScalarMap> second,
            Family family, double alpha, double beta, std::string name);

  double operator()(double x) const { return value_(x); }
  double value(double x) const { return value_(x); }
  double derivative(double x) const { return deriv_(x); }
  bool has_second_derivative() const { return second_.has_value(); }
  /// Throws PreconditionError when no second derivative was supplied.
  double second_derivative(double x) const;

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  bool symmetric() const { return true; }
  double domain_floor() const { return 0.0; }
  const std::string& name() const { return name_; }

  /// Smallest x >= 0 with Phi(x) >= Phi(0) + offset (the truncation rule).
  /// Throws PreconditionError if no such point exists below 1e12.
  double truncation_point(double offset = 40.0) const;

 private:
  ScalarMap value_;
  ScalarMap deriv_;
  std::optional<ScalarMap> second_;
  Family family_;
  double alpha_;
  double beta_;
  std::string name_;
};

/// |x|^alpha (power) or |x|^alpha log^beta(e + |x|) (power_log).
Potential make_builtin(Family family, double alpha, double beta = 0.0);

/// Custom potential from closures; Phi is evaluated at |x| by the caller's
/// closures, which must already be even.
Potential make_custom(ScalarMap value, ScalarMap deriv,
                      std::optional<ScalarMap> second = std::nullopt,
                      std::string name = "custom");

/// Potential tabulated on x >= 0 (first knot at 0), extended evenly to
/// x < 0. Values are interpolated with a monotone piecewise cubic
/// (Fritsch-Carlson); the derivative column, when absent, is the
/// derivative of that interpolant. Beyond the last knot the potential is
/// extended linearly with the final slope.
Potential make_tabulated(std::vector<double> x, std::vector<double> phi,
                         std::optional<std::vector<double>> dphi = std::nullopt,
                         std::string name = "tabulated");

/// Reads a whitespace- or comma-separated table with two or three columns
/// (x, Phi(x)[, Phi'(x)]); lines starting with '#' are comments.
Potential load_tabulated(const std::filesystem::path& path);

struct ScanGrid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points_per_decade = 2000;
  std::size_t points = 0;
  std::string describe() const;
};

struct HypothesisReport {
  double epsilon = 0.0;
  double big_m = 0.0;
  bool passed = false;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double growth_m1 = 0.0;
  double growth_m2 = 0.0;
  ScanGrid grid;
  std::string reason;  // empty when passed
};

/// Checks the growth hypothesis on a log grid from big_m to X_max, where
/// Phi(X_max) >= Phi(big_m) + 40. Ratios within a relative 1e-12 of the
/// bounds count as equal (closed inequality).
HypothesisReport check_hypothesis_H(const Potential& p, double epsilon,
                                    double big_m,
                                    std::size_t points_per_decade = 2000);

struct HypothesisScanEntry {
  double epsilon;
  double big_m;
  bool passed;
};

/// Evaluates check_hypothesis_H on every (epsilon, big_m) pair.
std::vector<HypothesisScanEntry> scan_hypothesis(
    const Potential& p, const std::vector<double>& epsilons,
    const std::vector<double>& big_ms, std::size_t points_per_decade = 500);

// Grid diagnostics for the potential invariants. Each returns the worst
// violation found (<= 0 means none).

/// max over a < b < c consecutive grid triples of Phi(b) - chord(a, c)(b).
double convexity_violation(const Potential& p, const std::vector<double>& grid);
/// max |Phi(x) - Phi(-x)|.
double symmetry_violation(const Potential& p, const std::vector<double>& grid);
/// max over consecutive grid points of Phi'(x_i) - Phi'(x_{i+1}); also
/// includes -Phi'(x) for x >= 0.
double monotone_derivative_violation(const Potential& p,
                                     const std::vector<double>& grid);
/// max |Phi'(x) - central difference| / (1 + |Phi'(x)|), h = 1e-5.
double derivative_mismatch(const Potential& p, const std::vector<double>& grid);

}  // namespace logsob
