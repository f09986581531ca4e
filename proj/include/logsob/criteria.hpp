#pragma once

// Criterion constants with provable brackets: the Hardy sup, the
// Barthe-Roberto constants of the weighted log-Sobolev inequality, the
// Muckenhoupt bracket on the Poincare constant and the Bakry-Emery check.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logsob/functionals.hpp"
#include "logsob/measure.hpp"

namespace logsob {

enum class CriterionKind { hardy, barthe_roberto, poincare, bakry_emery };
std::string to_string(CriterionKind kind);

/// How the objective behaves over the final stretch of the scan.
enum class Trend { interior, plateau, unbounded };
std::string to_string(Trend trend);

struct CriterionReport {
  CriterionKind kind = CriterionKind::hardy;
  double value = 0.0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  /// Location of the sup; infinity when it is approached at the scan end.
  double maximizer_x = 0.0;
  std::string grid_spec;
  bool finite = true;
  /// False when the criterion does not apply (Bakry-Emery with lambda <= 0).
  bool applicable = true;
  Trend trend = Trend::interior;
  /// Log-log slope of the objective over the trend window.
  double trend_slope = 0.0;
  /// Interval where the nu density vanishes, when that makes B infinite.
  std::optional<std::pair<double, double>> zero_interval;
  /// Named side quantities (b_plus, B_minus, lambda, ...).
  std::map<std::string, double> extra;
};

struct SupScan {
  double x_min = 0.0;   // 0 means x_scan * 1e-6
  double x_scan = 0.0;  // 0 means the operation's default
  std::size_t points_per_decade = 100;
  /// The trend is the log-log slope over [x_scan / trend_window, x_scan].
  double trend_window = 2.0;
  /// Slopes in (0, plateau_slope] count as a converged plateau.
  double plateau_slope = 0.05;
};

enum class Side { right, left };

/// B = sup_{x > 0} mu([x, x_max]) int_0^x 1/nu (right side), or the mirror
/// image on (-infinity, 0] for the left side. Bracket [B, 4B].
CriterionReport hardy_constant(const ScalarMap& mu_weight,
                               const ScalarMap& nu_weight, Side side,
                               double x_max, SupScan scan = {});

/// b and B constants of the weighted log-Sobolev inequality with weight h
/// (convex.h_weight, same big_m); bracket [max(b+, b-), max(B+, B-)].
/// The scan runs to Phi(x) = Phi(0) + 30 by default.
CriterionReport barthe_roberto(const LogConcaveMeasure& m, double big_m,
                               SupScan scan = {});

/// Hardy with mu = nu = the measure on each half-line; bracket [B, 4B] on
/// the Poincare constant. Throws PreconditionError when trunc < 1e-6.
CriterionReport muckenhoupt_poincare(const LogConcaveMeasure& m,
                                     SupScan scan = {});

/// lambda = inf Phi'' over [0, 10 X] (X the truncation point); when
/// lambda > 0 the log-Sobolev constant is at most 2 / lambda.
CriterionReport bakry_emery(const Potential& p, std::size_t points = 4000);

/// A e^{2 osc(h)} for a bounded perturbation h of the potential.
double perturbation_bound(double a_const, double osc_h);
double perturbation_bound(const BestConstantReport& report, double osc_h);

}  // namespace logsob
