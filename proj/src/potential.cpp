#include "logsob/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/cubic_hermite.hpp>

// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

namespace logsob {

std::string to_string(Family family) {
  switch (family) {
    case Family::power: return "power";
    case Family::power_log: return "power-log";
    case Family::custom: return "custom";
  }
  return "custom";
}

Family family_from_string(const std::string& name) {
  if (name == "power") return Family::power;
  if (name == "power-log" || name == "power_log") return Family::power_log;
  if (name == "custom") return Family::custom;
  throw PreconditionError("unknown potential family '" + name + "'");
}

Potential::Potential(ScalarMap value, ScalarMap deriv,
                     std::optional<ScalarMap> second, Family family,
                     double alpha, double beta, std::string name)
    : value_(std::move(value)),
      deriv_(std::move(deriv)),
      second_(std::move(second)),
      family_(family),
      alpha_(alpha),
      beta_(beta),
      name_(std::move(name)) {}

double Potential::second_derivative(double x) const {
  if (!second_) {
    throw PreconditionError("potential '" + name_ +
                            "' has no second derivative");
  }
  return (*second_)(x);
}

double Potential::truncation_point(double offset) const {
  const double target = value(0.0) + offset;
  const ScalarMap phi = [this](double x) { return value(x); };
  double hi = 0.0;
  try {
    hi = expand_bracket(phi, target, 1.0, 1e12);
  } catch (const NumericalError&) {
    throw PreconditionError("potential '" + name_ +
                            "' does not reach Phi(0) + offset: not integrable");
  }
  return bisect_leftmost(phi, target, 0.0, hi, 1e-14);
}

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

Potential make_power(double alpha) {
  auto value = [alpha](double x) { return std::pow(std::abs(x), alpha); };
  auto deriv = [alpha](double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    return sign(x) * alpha * std::pow(ax, alpha - 1.0);
  };
  auto second = [alpha](double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) {
      if (alpha < 2.0) return kInf;
      return alpha == 2.0 ? 2.0 : 0.0;
    }
    return alpha * (alpha - 1.0) * std::pow(ax, alpha - 2.0);
  };
  std::ostringstream name;
  name << "|x|^" << alpha;
  return Potential(value, deriv, ScalarMap(second), Family::power, alpha, 0.0,
                   name.str());
}

Potential make_power_log(double alpha, double beta) {
  constexpr double e = std::numbers::e;
  auto value = [alpha, beta](double x) {
    const double ax = std::abs(x);
    return std::pow(ax, alpha) * std::pow(std::log(e + ax), beta);
  };
  auto deriv = [alpha, beta](double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) return 0.0;
    const double u = e + ax;
    const double l = std::log(u);
    const double d = alpha * std::pow(ax, alpha - 1.0) * std::pow(l, beta) +
                     beta * std::pow(ax, alpha) * std::pow(l, beta - 1.0) / u;
    return sign(x) * d;
  };
  auto second = [alpha, beta](double x) {
    const double ax = std::abs(x);
    if (ax == 0.0) {
      if (alpha < 2.0) return kInf;
      return alpha == 2.0 ? 2.0 : 0.0;
    }
    const double u = e + ax;
    const double l = std::log(u);
    return alpha * (alpha - 1.0) * std::pow(ax, alpha - 2.0) * std::pow(l, beta) +
           2.0 * alpha * beta * std::pow(ax, alpha - 1.0) *
               std::pow(l, beta - 1.0) / u +
           beta * (beta - 1.0) * std::pow(ax, alpha) * std::pow(l, beta - 2.0) /
               (u * u) -
           beta * std::pow(ax, alpha) * std::pow(l, beta - 1.0) / (u * u);
  };
  std::ostringstream name;
  name << "|x|^" << alpha << " log^" << beta << "(e+|x|)";
  return Potential(value, deriv, ScalarMap(second), Family::power_log, alpha,
                   beta, name.str());
}

}  // namespace

Potential make_builtin(Family family, double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw PreconditionError("potential parameters must be finite");
  }
  if (alpha < 1.0) {
    throw PreconditionError("alpha < 1 gives non-convex tails");
  }
  switch (family) {
    case Family::power:
      return make_power(alpha);
    case Family::power_log:
      if (alpha == 1.0 && beta < 0.0) {
        throw PreconditionError(
            "beta < 0 with alpha = 1 is not guaranteed integrable");
      }
      return make_power_log(alpha, beta);
    case Family::custom:
      break;
  }
  throw PreconditionError("make_builtin needs the power or power-log family");
}

Potential make_custom(ScalarMap value, ScalarMap deriv,
                      std::optional<ScalarMap> second, std::string name) {
  return Potential(std::move(value), std::move(deriv), std::move(second),
                   Family::custom, 0.0, 0.0, std::move(name));
}

Potential make_tabulated(std::vector<double> x, std::vector<double> phi,
                         std::optional<std::vector<double>> dphi,
                         std::string name) {
  if (x.size() != phi.size() || (dphi && dphi->size() != x.size())) {
    throw PreconditionError("tabulated potential columns differ in length");
  }
  if (x.size() < 4) {
    throw PreconditionError("tabulated potential needs at least four knots");
  }
  if (x.front() != 0.0) {
    throw PreconditionError("tabulated potential must start at x = 0");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      throw PreconditionError("tabulated x column must be strictly increasing");
    }
  }
  const double x_last = x.back();
  const double phi_last = phi.back();

  std::function<double(double)> interp;
  std::function<double(double)> interp_prime;
  if (dphi) {
    using Spline = boost::math::interpolators::cubic_hermite<std::vector<double>>;
    auto spline = std::make_shared<Spline>(std::move(x), std::move(phi),
                                           std::move(*dphi));
    interp = [spline](double t) { return (*spline)(t); };
    interp_prime = [spline](double t) { return spline->prime(t); };
  } else {
    using Spline = boost::math::interpolators::pchip<std::vector<double>>;
    auto spline = std::make_shared<Spline>(std::move(x), std::move(phi));
    interp = [spline](double t) { return (*spline)(t); };
    interp_prime = [spline](double t) { return spline->prime(t); };
  }
  const double slope_last = interp_prime(x_last);

  auto value = [=](double t) {
    const double a = std::abs(t);
    if (a >= x_last) return phi_last + slope_last * (a - x_last);
    return interp(a);
  };
  auto deriv = [=](double t) {
    const double a = std::abs(t);
    if (a == 0.0) return 0.0;
    const double d = a >= x_last ? slope_last : interp_prime(a);
    return sign(t) * d;
  };
  return make_custom(value, deriv, std::nullopt, std::move(name));
}

Potential load_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open table '" + path.string() + "'");
  std::vector<double> xs, phis, dphis;
  std::size_t columns = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> row;
    double v = 0.0;
    while (fields >> v) row.push_back(v);
    if (!fields.eof()) {
      throw PreconditionError("malformed number on line " +
                              std::to_string(lineno) + " of " + path.string());
    }
    if (row.size() != 2 && row.size() != 3) {
      throw PreconditionError("expected 2 or 3 columns on line " +
                              std::to_string(lineno));
    }
    if (columns == 0) columns = row.size();
    if (row.size() != columns) {
      throw PreconditionError("inconsistent column count on line " +
                              std::to_string(lineno));
    }
    xs.push_back(row[0]);
    phis.push_back(row[1]);
    if (columns == 3) dphis.push_back(row[2]);
  }
  std::optional<std::vector<double>> d;
  if (columns == 3) d = std::move(dphis);
  return make_tabulated(std::move(xs), std::move(phis), std::move(d),
                        "table:" + path.filename().string());
}

std::string ScanGrid::describe() const {
  std::ostringstream s;
  s.precision(17);
  s << "log grid [" << lo << ", " << hi << "], " << points << " points ("
    << points_per_decade << "/decade)";
  return s.str();
}

HypothesisReport check_hypothesis_H(const Potential& p, double epsilon,
                                    double big_m,
                                    std::size_t points_per_decade) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    throw PreconditionError("epsilon must lie in (0, 1/2]");
  }
  if (!(big_m > 0.0) || !std::isfinite(big_m)) {
    throw PreconditionError("big_m must be positive and finite");
  }
  HypothesisReport rep;
  rep.epsilon = epsilon;
  rep.big_m = big_m;
  const double phi_m = p(big_m);
  if (!(phi_m > 0.0)) {
    rep.passed = false;
    rep.reason = "Phi(M) <= 0";
    return rep;
  }
  const ScalarMap phi = [&p](double x) { return p(x); };
  const double target = phi_m + 40.0;
  double x_max = 0.0;
  try {
    x_max = expand_bracket(phi, target, big_m, 1e15);
  } catch (const NumericalError&) {
    rep.passed = false;
    rep.reason = "Phi does not grow by 40 beyond M";
    return rep;
  }
  x_max = bisect_leftmost(phi, target, big_m, x_max, 1e-14);

  const auto grid = log_grid_per_decade(big_m, x_max, points_per_decade, 2001);
  rep.grid = {big_m, x_max, points_per_decade, grid.size()};

  double rmin = kInf, rmax = -kInf, m1 = kInf, m2 = -kInf;
  const double e1 = 1.0 / (1.0 - epsilon);
  const double e2 = 2.0 - epsilon;
  for (const double x : grid) {
    const double v = p(x);
    const double r = x * p.derivative(x) / v;
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    m1 = std::min(m1, v / std::pow(x, e1));
    m2 = std::max(m2, v / std::pow(x, e2));
  }
  rep.ratio_min = rmin;
  rep.ratio_max = rmax;
  rep.growth_m1 = m1;
  rep.growth_m2 = m2;
  constexpr double slack = 1e-12;
  const bool low_ok = rmin >= (1.0 + epsilon) * (1.0 - slack);
  const bool high_ok = rmax <= (2.0 - epsilon) * (1.0 + slack);
  rep.passed = low_ok && high_ok;
  if (!low_ok) {
    rep.reason = "x Phi'(x) / Phi(x) falls below 1 + epsilon";
  } else if (!high_ok) {
    rep.reason = "x Phi'(x) / Phi(x) exceeds 2 - epsilon";
  }
  return rep;
}

std::vector<HypothesisScanEntry> scan_hypothesis(
    const Potential& p, const std::vector<double>& epsilons,
    const std::vector<double>& big_ms, std::size_t points_per_decade) {
  std::vector<HypothesisScanEntry> out;
  out.reserve(epsilons.size() * big_ms.size());
  for (const double eps : epsilons) {
    for (const double m : big_ms) {
      out.push_back({eps, m, check_hypothesis_H(p, eps, m, points_per_decade).passed});
    }
  }
  return out;
}

double convexity_violation(const Potential& p, const std::vector<double>& grid) {
  double worst = -kInf;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double a = grid[i - 1], b = grid[i], c = grid[i + 1];
    const double w = (b - a) / (c - a);
    const double chord = (1.0 - w) * p(a) + w * p(c);
    worst = std::max(worst, p(b) - chord);
  }
  return worst;
}

double symmetry_violation(const Potential& p, const std::vector<double>& grid) {
  double worst = 0.0;
  for (const double x : grid) worst = std::max(worst, std::abs(p(x) - p(-x)));
  return worst;
}

double monotone_derivative_violation(const Potential& p,
                                     const std::vector<double>& grid) {
  double worst = -kInf;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    worst = std::max(worst, p.derivative(grid[i]) - p.derivative(grid[i + 1]));
  }
  for (const double x : grid) {
    if (x >= 0.0) worst = std::max(worst, -p.derivative(x));
  }
  return worst;
}

double derivative_mismatch(const Potential& p, const std::vector<double>& grid) {
  constexpr double h = 1e-5;
  double worst = 0.0;
  for (const double x : grid) {
    const double fd = (p(x + h) - p(x - h)) / (2.0 * h);
    const double d = p.derivative(x);
    worst = std::max(worst, std::abs(d - fd) / (1.0 + std::abs(d)));
  }
  return worst;
}

}  // namespace logsob
