#pragma once

// Grid verification of the auxiliary inequalities behind the modified
// log-Sobolev inequality. Each "there exists a constant" statement becomes
// a bounded search over a log grid of candidates with witness reporting.

#include <optional>
#include <string>
#include <vector>

#include "logsob/convex.hpp"
#include "logsob/potential.hpp"

namespace logsob {

struct FoundConstant {
  std::string name;
  double value = 0.0;
  /// Closed-form or a-priori candidate, when one is known.
  std::optional<double> candidate;
};

struct LemmaVerdict {
  std::string lemma;
  std::string grid_spec;
  std::vector<FoundConstant> found_constants;
  /// Grid points where no constant within the cap works.
  std::vector<double> violation_points;
  bool passed = false;
  std::string note;

  /// Value of a named constant; throws std::out_of_range if absent.
  const FoundConstant& constant(const std::string& name) const;
};

/// Smallest 2^(k/16) >= required (relative slack 1e-9), or nullopt when
/// that exceeds cap.
std::optional<double> grid_constant(double required, double cap);

/// x^2 <= C Phi*(x), eps Phi(Phi'^-1(x)) <= Phi*(x) <= (1 - eps) Phi(Phi'^-1(x))
/// and Phi'^-1(x) / C <= Phi*(x) / x <= C Phi'^-1(x) for x >= max(1, Phi'(M)),
/// using the epsilon and M of a passed hypothesis report.
LemmaVerdict verify_lem_av(const Potential& p, const HypothesisReport& rep,
                           double cap = 1e6);

enum class DecompositionVariant { two, a_lambda };

/// x^2 log x^2 <= A (x - 1)^2 + x^2 - 1 + (x - s)_+^2 log (x - s)_+^2 on
/// [0, x_max]. Variant two fixes A = 5, s = 2; variant a_lambda uses
/// s = sqrt(a_lambda) (a_lambda >= 2) and finds the smallest integer
/// A <= 1e6.
LemmaVerdict verify_scalar_decomposition(DecompositionVariant variant,
                                         double a_lambda = 4.0,
                                         double x_max = 1e3,
                                         std::size_t points = 100001);

/// tau*(x^2) <= A Phi*(C x) for x >= D and <= B x^2 for x <= D, with tau*
/// conjugated on a 4096-point tabulation of tau. D = 1 and C = 1, 2, 4, ...
/// until A and B fit under the cap.
LemmaVerdict verify_legendre_tau(const Potential& p, double big_m, double c_h,
                                 double cap = 1e6);

/// tau2(K^2(x) / u0) <= log(x^2) / 2 for x >= a_lambda on a log grid to
/// 1e8; reports the smallest admissible u0 = 2^(k/16) <= cap.
LemmaVerdict verify_tau2(const Potential& p, double big_m, double lam,
                         double eps, double a_lambda, double cap = 1e3);

/// psi positive, increasing and concave beyond A_lambda with
/// psi(A_lambda) >= 1, and g'/g decreasing over the last decade, where
/// g = (Phi*)^-1.
LemmaVerdict verify_psi_shape(const Potential& p, double lam,
                              PsiScan scan = {});

struct LemmaParams {
  double epsilon = 0.0;
  double big_m = 0.0;
  double lam = 1.0;
  /// Weighted log-Sobolev constant; <= 0 means take the upper
  /// Barthe-Roberto bracket.
  double c_h = 0.0;
  double cap = 1e6;
};

/// Default (epsilon, M) for the built-in families: power alpha uses
/// epsilon = min(alpha - 1, 2 - alpha, 1/2) and M = 1; power-log uses
/// (0.15, 1). Custom potentials have no default.
LemmaParams default_lemma_params(const Potential& p);

/// Runs every verification; throws PreconditionError when (H) fails.
std::vector<LemmaVerdict> run_lemma_battery(const Potential& p,
                                            LemmaParams params);

}  // namespace logsob
