#include "logsob/convex.hpp"

#include <algorithm>
#include <cmath>

namespace logsob {

LegendreEngine::LegendreEngine(Potential p, double tol, double bracket_growth)
    : p_(std::make_shared<const Potential>(std::move(p))),
      tol_(tol),
      growth_(bracket_growth) {
  if (!(tol > 0.0) || !(bracket_growth > 1.0)) {
    throw PreconditionError("LegendreEngine needs tol > 0 and growth > 1");
  }
}

double LegendreEngine::invert_derivative(double y) const {
  if (!std::isfinite(y)) throw PreconditionError("invert_derivative: non-finite y");
  if (y < 0.0) throw PreconditionError("invert_derivative: y must be >= 0");
  const Potential& p = *p_;
  if (p.derivative(0.0) >= y) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (p.derivative(hi) < y) {
    lo = hi;
    hi *= growth_;
    if (!std::isfinite(hi) || hi > 1e300) {
      throw NumericalError("Phi' stays below " + std::to_string(y) +
                           ": Phi* is infinite there");
    }
  }
  const ScalarMap dphi = [&p](double x) { return p.derivative(x); };
  return bisect_leftmost(dphi, y, lo, hi, tol_);
}

double LegendreEngine::legendre(double y) const {
  const double ay = std::abs(y);
  const double x = invert_derivative(ay);
  return ay * x - p_->value(x);
}

double LegendreEngine::legendre_inverse(double z) const {
  const double floor = legendre(0.0);
  if (z <= floor) return 0.0;
  const ScalarMap conj = [this](double y) {
    try {
      return legendre(y);
    } catch (const NumericalError&) {
      return kInf;
    }
  };
  const double hi = expand_bracket(conj, z, 1.0, 1e300);
  return bisect_leftmost(conj, z, 0.0, hi, 0.0);
}

double numeric_conjugate(const ScalarMap& f, double y, double x_hi) {
  const ScalarMap neg = [&](double x) { return f(x) - y * x; };
  constexpr std::size_t n = 513;
  const auto grid = linspace(0.0, x_hi, n);
  std::size_t best = 0;
  double best_val = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = neg(grid[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, n - 1)];
  const auto refined = golden_section_min(neg, a, b, 1e-14);
  return -std::min(refined.value, best_val);
}

double h_weight(const Potential& p, double big_m, double x) {
  const double ax = std::abs(x);
  if (ax < big_m) return 1.0;
  return ax * ax / p(ax);
}

HFunction HFunction::quadratic() { return HFunction{}; }

HFunction HFunction::with_constants(const LegendreEngine& engine,
                                    double b_const, double d_const) {
  if (!(b_const > 0.0) || !(d_const > 0.0)) {
    throw PreconditionError("H needs B > 0 and D > 0");
  }
  HFunction h;
  h.engine_ = std::make_shared<const LegendreEngine>(engine);
  h.b_ = b_const;
  h.d_ = d_const;
  if (std::isfinite(d_const)) {
    h.jump_ = engine.legendre(b_const * d_const) - d_const * d_const;
    h.continuous_ = std::abs(h.jump_) <= 1e-9 * (1.0 + d_const * d_const);
  }
  return h;
}

double HFunction::operator()(double x) const {
  const double ax = std::abs(x);
  if (ax <= d_ || !engine_) return ax * ax;
  return engine_->legendre(b_ * ax);
}

HFunction build_H(const LegendreEngine& engine, double b_const, double d_max) {
  if (!(b_const > 0.0)) throw PreconditionError("build_H needs B > 0");
  const auto gap = [&](double d) {
    try {
      return engine.legendre(b_const * d) - d * d;
    } catch (const NumericalError&) {
      return kInf;
    }
  };
  const auto grid = log_grid_per_decade(1e-6, d_max, 50);
  std::vector<double> g(grid.size());
  bool degenerate = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    g[i] = gap(grid[i]);
    const double d2 = grid[i] * grid[i];
    if (!(std::abs(g[i]) <= 1e-9 * d2)) degenerate = false;
  }

  HFunction h;
  h.engine_ = std::make_shared<const LegendreEngine>(engine);
  h.b_ = b_const;
  if (degenerate) {
    h.d_ = kInf;
    h.degenerate_ = true;
    return h;
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (g[i] == 0.0) {
      h.d_ = grid[i];
      return h;
    }
    if ((g[i] < 0.0) != (g[i + 1] < 0.0)) {
      // bisection on the sign change
      double lo = grid[i], hi = grid[i + 1];
      const bool lo_neg = g[i] < 0.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((gap(mid) < 0.0) == lo_neg) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      h.d_ = 0.5 * (lo + hi);
      h.jump_ = gap(h.d_);
      return h;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(g[i]) < std::abs(g[best])) best = i;
  }
  h.d_ = grid[best];
  h.jump_ = g[best];
  h.continuous_ = false;
  return h;
}

TauFunction::TauFunction(const Potential& p, double big_m, double scale)
    : p_(std::make_shared<const Potential>(p)),
      big_m_(big_m),
      scale_(scale),
      m_(0.0) {
  if (!(big_m > 0.0)) throw PreconditionError("tau needs M > 0");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw PreconditionError("tau needs a positive finite scale");
  }
  const double phi_m = p(big_m);
  if (!(phi_m > 0.0)) throw PreconditionError("tau needs Phi(M) > 0");
  m_ = big_m * big_m / phi_m;
  // h must be nondecreasing on [M, infinity)
  const double x_hi = std::max(big_m * 1e3, p.truncation_point(400.0));
  const auto grid = log_grid(big_m, x_hi, 2000);
  double prev = h_weight(p, big_m, grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = h_weight(p, big_m, grid[i]);
    if (cur < prev * (1.0 - 1e-12)) {
      throw PreconditionError("h = x^2 / Phi is not increasing on [M, inf)");
    }
    prev = cur;
  }
}

double TauFunction::h_inverse(double u) const {
  if (u <= m_) return big_m_;
  const Potential& p = *p_;
  const double big_m = big_m_;
  const ScalarMap h = [&p, big_m](double x) { return h_weight(p, big_m, x); };
  double hi = big_m_;
  while (h(hi) < u) {
    hi *= 2.0;
    if (hi > 1e300 || !std::isfinite(h(hi))) return kInf;
  }
  return bisect_leftmost(h, u, std::max(big_m_, hi / 2.0), hi, 0.0);
}

double TauFunction::operator()(double x) const {
  if (x < 0.0) throw PreconditionError("tau: x must be >= 0");
  if (x <= m_) return scale_ * p_->value(big_m_) * x / m_;
  const double y = h_inverse(x);
  if (!std::isfinite(y)) return kInf;
  return scale_ * p_->value(y);
}

TauFunction make_tau(const Potential& p, double big_m, double c_h) {
  if (!(c_h > 0.0)) throw PreconditionError("tau needs C_h > 0");
  return TauFunction(p, big_m, 1.0 / (8.0 * c_h));
}

TauFunction make_tau2(const Potential& p, double big_m, double lam, double eps) {
  if (!(lam > 0.0)) throw PreconditionError("tau2 needs lambda > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("tau2 needs eps in (0,1)");
  return TauFunction(p, big_m, (1.0 - eps) / (2.0 * lam));
}

double tau(const Potential& p, double big_m, double c_h, double x) {
  return make_tau(p, big_m, c_h)(x);
}

double tau2(const Potential& p, double big_m, double lam, double eps, double x) {
  return make_tau2(p, big_m, lam, eps)(x);
}

double psi(const LegendreEngine& e, double lam, double x) {
  if (!(lam > 0.0)) throw PreconditionError("psi needs lambda > 0");
  if (!(x > 0.0)) throw PreconditionError("psi needs x > 0");
  const double z = lam * std::log(x);
  if (z < e.legendre(0.0)) {
    throw PreconditionError("psi undefined: lambda log x below Phi*(0)");
  }
  const double g = e.legendre_inverse(z);
  return g * g;
}

double find_A_lambda(const LegendreEngine& e, double lam, PsiScan scan) {
  if (!(lam > 0.0)) throw PreconditionError("find_A_lambda needs lambda > 0");
  // psi is defined from x = exp(Phi*(0) / lam) on
  const double x_lo = std::max(1.0, std::exp(e.legendre(0.0) / lam)) * (1.0 + 1e-9);
  const auto grid = log_grid_per_decade(x_lo, scan.x_hi, scan.points_per_decade);
  const std::size_t n = grid.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = psi(e, lam, grid[i]);

  // last index whose neighbourhood violates monotonicity or concavity
  std::size_t first_ok = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const double slope = (v[i] - v[i - 1]) / (grid[i] - grid[i - 1]);
    bool bad = !(v[i] > v[i - 1]) || !(v[i] > 0.0);
    if (i >= 2) {
      const double prev = (v[i - 1] - v[i - 2]) / (grid[i - 1] - grid[i - 2]);
      if (slope - prev > 1e-12 * std::max(1.0, std::abs(prev))) bad = true;
    }
    if (bad) first_ok = i;
  }
  std::size_t first_one = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] >= 1.0) {
      first_one = i;
      break;
    }
  }
  if (first_one == n || first_ok + 1 >= n) {
    throw NumericalError("find_A_lambda: psi never becomes >= 1, increasing "
                         "and concave on the scan grid");
  }
  if (first_one > first_ok && first_one > 0) {
    const ScalarMap f = [&](double x) { return psi(e, lam, x); };
    return bisect_leftmost(f, 1.0, grid[first_one - 1], grid[first_one], 0.0);
  }
  return grid[std::max(first_ok, first_one)];
}

double k_weight(const LegendreEngine& e, double lam, double x) {
  const double x2 = x * x;
  if (!(x2 > 1.0)) throw PreconditionError("k_weight needs x^2 > 1");
  const double denom = psi(e, lam, x2);
  if (!(denom > 0.0)) throw PreconditionError("k_weight: psi(x^2) vanishes");
  return std::sqrt(std::log(x2) / denom);
}

}  // namespace logsob
