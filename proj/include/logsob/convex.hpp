#pragma once

// Numerical convex duality for symmetric potentials: inversion of Phi',
// the Legendre-Fenchel transform Phi*, the weight h, the cost function
// H_Phi, and the auxiliary functions tau, tau2, psi and K.

#include <memory>
#include <string>
#include <vector>

#include "logsob/numerics.hpp"
#include "logsob/potential.hpp"

namespace logsob {

/// Evaluates Phi'^{-1}, Phi* and (Phi*)^{-1} by bracket expansion and
/// bisection. Cheap to copy; shares the underlying potential.
class LegendreEngine {
 public:
  explicit LegendreEngine(Potential p, double tol = 1e-10,
                          double bracket_growth = 2.0);

  const Potential& potential() const { return *p_; }
  double tol() const { return tol_; }
  double bracket_growth() const { return growth_; }

  /// Leftmost x >= 0 with Phi'(x) >= y. Returns 0 when y <= Phi'(0+).
  /// Throws NumericalError when Phi' stays below y (Phi* infinite).
  double invert_derivative(double y) const;

  /// Phi*(y) = |y| x_y - Phi(x_y), even in y.
  double legendre(double y) const;

  /// Smallest y >= 0 with Phi*(y) >= z, for z >= Phi*(0).
  double legendre_inverse(double z) const;

 private:
  std::shared_ptr<const Potential> p_;
  double tol_;
  double growth_;
};

/// sup over x in [0, x_hi] of {x y - f(x)} for an even convex f, by a grid
/// scan followed by golden-section refinement. Independent of Phi'.
double numeric_conjugate(const ScalarMap& f, double y, double x_hi);

/// h(x) = 1 for |x| < M, x^2 / Phi(x) otherwise.
double h_weight(const Potential& p, double big_m, double x);

/// The cost H(x) = x^2 for |x| <= D, Phi*(B |x|) beyond.
class HFunction {
 public:
  /// H(x) = x^2 everywhere (D = infinity).
  static HFunction quadratic();
  /// Explicit constants; the quadratic branch is used at |x| = D.
  static HFunction with_constants(const LegendreEngine& engine, double b_const,
                                  double d_const);

  double operator()(double x) const;

  double b_const() const { return b_; }
  double d_const() const { return d_; }
  /// True when Phi*(B D) = D^2 was solved, so H is continuous.
  bool continuous() const { return continuous_; }
  /// True when Phi*(B x) = x^2 on the whole search grid.
  bool degenerate() const { return degenerate_; }
  /// Phi*(B D) - D^2 at the chosen D.
  double jump() const { return jump_; }
  bool quadratic_only() const { return !engine_; }
  const LegendreEngine* engine() const { return engine_.get(); }

 private:
  friend HFunction build_H(const LegendreEngine&, double, double);
  std::shared_ptr<const LegendreEngine> engine_;
  double b_ = 1.0;
  double d_ = kInf;
  bool continuous_ = true;
  bool degenerate_ = false;
  double jump_ = 0.0;
};

/// Chooses D as the first positive root of Phi*(B D) = D^2 on a log grid
/// over [1e-6, d_max]. Degenerate potentials (Phi*(B x) = x^2) yield a
/// purely quadratic H; with no root, D minimizes |Phi*(B D) - D^2| and
/// continuous() is false.
HFunction build_H(const LegendreEngine& engine, double b_const,
                  double d_max = 1e6);

/// tau-type function: scale * Phi(M) * x / m for 0 <= x <= m and
/// scale * Phi(h^{-1}(x)) for x >= m, where m = h(M).
class TauFunction {
 public:
  TauFunction(const Potential& p, double big_m, double scale);

  double operator()(double x) const;
  /// Smallest x >= M with h(x) >= u; infinity when h stays below u.
  double h_inverse(double u) const;

  double m() const { return m_; }
  double big_m() const { return big_m_; }
  double scale() const { return scale_; }
  const Potential& potential() const { return *p_; }

 private:
  std::shared_ptr<const Potential> p_;
  double big_m_;
  double scale_;
  double m_;
};

/// tau with scale 1 / (8 C_h).
TauFunction make_tau(const Potential& p, double big_m, double c_h);
/// tau2 with scale (1 - eps) / (2 lambda).
TauFunction make_tau2(const Potential& p, double big_m, double lam, double eps);

double tau(const Potential& p, double big_m, double c_h, double x);
double tau2(const Potential& p, double big_m, double lam, double eps, double x);

/// psi(x) = ((Phi*)^{-1}(lam log x))^2. Throws PreconditionError when
/// lam log x < Phi*(0).
double psi(const LegendreEngine& e, double lam, double x);

struct PsiScan {
  double x_hi = 1e8;
  std::size_t points_per_decade = 100;
};

/// Smallest A on the scan grid beyond which psi is defined, increasing,
/// concave, and psi(A) >= 1; the psi(A) = 1 boundary is refined by
/// bisection when it is the binding constraint.
double find_A_lambda(const LegendreEngine& e, double lam, PsiScan scan = {});

/// K(x) = sqrt(log x^2 / psi(x^2)).
double k_weight(const LegendreEngine& e, double lam, double x);

}  // namespace logsob
