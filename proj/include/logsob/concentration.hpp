#pragma once

// Herbst argument for the modified log-Sobolev inequality: the function
// G(t), its minimization, deviation bounds for Lipschitz statistics of n
// independent draws, and Monte-Carlo validation.

#include <cstdint>
#include <string>
#include <vector>

#include "logsob/convex.hpp"
#include "logsob/measure.hpp"

namespace logsob {

/// I(t) = int_0^t s^-2 H(s/2) ds; exactly t/4 while s/2 stays in the
/// quadratic core.
double herbst_inner(const HFunction& hf, double t);

/// G(t) = A t I(t) - lam t.
double herbst_G(double a_const, const HFunction& hf, double t, double lam);

struct GMinimum {
  double t_star;
  double g_min;
};

/// Minimizes the convex G over t >= 0 by golden section after a doubling
/// bracket. Throws NumericalError when G still decreases at t = 1e6.
GMinimum minimize_G(double a_const, const HFunction& hf, double lam);

/// lam t - A t I(t) - A H(t/2): zero at the minimizer.
double herbst_first_order_gap(double a_const, const HFunction& hf, double lam,
                              double t);

/// exp(A t I(t)), the Laplace-transform bound for a centered 1-Lipschitz
/// observable.
double laplace_bound(double a_const, const HFunction& hf, double t);

/// Which normalization of S = sum_k (f(X_k) - mu(f)) the deviation lam
/// refers to.
enum class Statistic { sum, mean, sqrt_n };
std::string to_string(Statistic s);
Statistic statistic_from_string(const std::string& name);

struct TailBound {
  double raw;      // 2 exp(min_t G_n(t)), may exceed 1
  double capped;   // min(1, raw)
  double t_star;
  bool gaussian;   // minimizer inside the quadratic core of H
};

/// P(|S| > lam) <= 2 exp(min_t [A n t I(t) - (lam / zeta) t]) for the sum;
/// the mean and sqrt_n statistics rescale lam to n lam and sqrt(n) lam.
TailBound tail_bound_detail(double a_const, const HFunction& hf, double lam,
                            std::size_t n, double zeta,
                            Statistic stat = Statistic::sum);
double tail_bound(double a_const, const HFunction& hf, double lam,
                  std::size_t n, double zeta);

/// Deviation where the bound leaves the Gaussian regime: A n D zeta for
/// the sum, A D zeta for the mean, A D zeta sqrt(n) for sqrt_n.
double regime_split(double a_const, const HFunction& hf, std::size_t n,
                    double zeta, Statistic stat);

/// First lam on the grid where log(raw bound) departs from the Gaussian
/// closed form by more than 1e-8 (relative); infinity if it never does.
double detect_regime_split(double a_const, const HFunction& hf, std::size_t n,
                           double zeta, Statistic stat,
                           const std::vector<double>& lam_grid);

struct DeviationRow {
  double lam;
  double empirical;
  double stderr_;
};

/// Empirical P(|stat| > lam) over `trials` seeded batches of n draws.
/// Trial k uses its own generator seeded with stream_seed(seed, k).
std::vector<DeviationRow> empirical_deviation(
    const LogConcaveMeasure& m, const ScalarMap& f, std::size_t n,
    const std::vector<double>& lam_grid, std::size_t trials, std::uint64_t seed,
    Statistic stat = Statistic::mean, unsigned threads = 1);

/// Log-Sobolev constant of a product measure: max(a1, a2).
double tensorize(double a1, double a2);

}  // namespace logsob
