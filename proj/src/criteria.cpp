#include "logsob/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "logsob/convex.hpp"

namespace logsob {

std::string to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::hardy: return "hardy";
    case CriterionKind::barthe_roberto: return "barthe_roberto";
    case CriterionKind::poincare: return "poincare";
    case CriterionKind::bakry_emery: return "bakry_emery";
  }
  return "hardy";
}

std::string to_string(Trend trend) {
  switch (trend) {
    case Trend::interior: return "interior";
    case Trend::plateau: return "plateau";
    case Trend::unbounded: return "possibly-unbounded";
  }
  return "interior";
}

namespace {

struct SupOutcome {
  double value = 0.0;
  double argmax = 0.0;
  Trend trend = Trend::interior;
  double slope = 0.0;
};

double log_slope(double x0, double v0, double x1, double v1) {
  if (v0 > 0.0 && v1 > 0.0) return std::log(v1 / v0) / std::log(x1 / x0);
  if (v1 > v0) return kInf;
  if (v1 < v0) return -kInf;
  return 0.0;
}

// Grid sup with the trend test and a golden-section polish of an interior
// maximum. `at` evaluates the objective off the grid.
SupOutcome grid_sup(const std::vector<double>& xs, const std::vector<double>& obj,
                    const ScalarMap& at, const SupScan& scan) {
  const std::size_t n = xs.size();
  SupOutcome out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (obj[i] > obj[best]) best = i;
  }
  const double x_end = xs.back();
  std::size_t j0 = 0;
  while (j0 + 1 < n && xs[j0] < x_end / scan.trend_window) ++j0;
  if (j0 + 1 >= n) j0 = n >= 2 ? n - 2 : 0;
  out.slope = log_slope(xs[j0], obj[j0], x_end, obj.back());
  if (out.slope <= 0.0) {
    out.trend = Trend::interior;
  } else if (out.slope <= scan.plateau_slope) {
    out.trend = Trend::plateau;
  } else {
    out.trend = Trend::unbounded;
    out.value = kInf;
    out.argmax = kInf;
    return out;
  }
  out.value = obj[best];
  out.argmax = xs[best];
  if (best + 1 == n) {
    if (out.trend == Trend::plateau) out.argmax = kInf;
    return out;
  }
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[best + 1];
  const auto polished = golden_section_min([&](double x) { return -at(x); }, a, b, 1e-10);
  if (-polished.value > out.value) {
    out.value = -polished.value;
    out.argmax = polished.x;
  }
  return out;
}

double integrate_checked(const ScalarMap& f, double a, double b,
                         std::vector<double>* zeros, const ScalarMap* nu) {
  double sum = 0.0;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (const auto& q : gauss_legendre_rule()) {
    const double x = mid + half * q.x;
    if (nu && !((*nu)(x) > 0.0)) {
      if (zeros) zeros->push_back(x);
      continue;
    }
    sum += half * q.w * f(x);
  }
  return sum;
}

std::string describe_grid(double lo, double hi, std::size_t ppd, std::size_t n,
                          double window) {
  std::ostringstream os;
  os << "log grid [" << lo << ", " << hi << "], " << ppd << "/decade, " << n
     << " points, trend window x/" << window;
  return os.str();
}

CriterionReport hardy_right(const ScalarMap& mu, const ScalarMap& nu,
                            double x_max, SupScan scan) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) {
    throw PreconditionError("hardy_constant needs a finite x_max > 0");
  }
  if (scan.x_scan <= 0.0) scan.x_scan = 0.5 * x_max;
  if (scan.x_scan > x_max) throw PreconditionError("hardy_constant needs x_scan <= x_max");
  if (scan.x_min <= 0.0) scan.x_min = 1e-6 * scan.x_scan;
  const auto xs = log_grid_per_decade(scan.x_min, scan.x_scan, scan.points_per_decade, 16);
  const std::size_t n = xs.size();

  CriterionReport rep;
  rep.kind = CriterionKind::hardy;
  rep.grid_spec = describe_grid(scan.x_min, scan.x_scan, scan.points_per_decade, n,
                                scan.trend_window);

  const ScalarMap inv_nu = [&nu](double x) { return 1.0 / nu(x); };
  std::vector<double> zeros;
  std::vector<double> inner(n), tail(n);
  {
    std::vector<QuadNode> first;
    append_graded_toward_left(first, 0.0, xs[0], 40);
    double s = 0.0;
    for (const auto& q : first) {
      if (!(nu(q.x) > 0.0)) {
        zeros.push_back(q.x);
        continue;
      }
      s += q.w / nu(q.x);
    }
    inner[0] = s;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    inner[i + 1] = inner[i] + integrate_checked(inv_nu, xs[i], xs[i + 1], &zeros, &nu);
  }
  tail[n - 1] = integrate(mu, xs[n - 1], x_max, 512);
  for (std::size_t i = n - 1; i-- > 0;) {
    tail[i] = tail[i + 1] + integrate(mu, xs[i], xs[i + 1], 1);
  }
  if (!zeros.empty()) {
    const auto [lo, hi] = std::minmax_element(zeros.begin(), zeros.end());
    rep.zero_interval = std::make_pair(*lo, *hi);
    rep.finite = false;
    rep.value = rep.bracket_low = rep.bracket_high = kInf;
    rep.maximizer_x = *hi;
    rep.trend = Trend::unbounded;
    return rep;
  }

  std::vector<double> obj(n);
  for (std::size_t i = 0; i < n; ++i) obj[i] = tail[i] * inner[i];
  const ScalarMap at = [&](double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (i + 1 >= n) i = n - 2;
    const double t = tail[i] - integrate(mu, xs[i], x, 1);
    const double in = inner[i] + integrate(inv_nu, xs[i], x, 1);
    return t * in;
  };
  const auto sup = grid_sup(xs, obj, at, scan);
  rep.value = sup.value;
  rep.maximizer_x = sup.argmax;
  rep.trend = sup.trend;
  rep.trend_slope = sup.slope;
  rep.finite = std::isfinite(sup.value);
  rep.bracket_low = sup.value;
  rep.bracket_high = 4.0 * sup.value;
  return rep;
}

}  // namespace

CriterionReport hardy_constant(const ScalarMap& mu_weight,
                               const ScalarMap& nu_weight, Side side,
                               double x_max, SupScan scan) {
  if (side == Side::right) return hardy_right(mu_weight, nu_weight, x_max, scan);
  const ScalarMap mu = [&mu_weight](double x) { return mu_weight(-x); };
  const ScalarMap nu = [&nu_weight](double x) { return nu_weight(-x); };
  auto rep = hardy_right(mu, nu, x_max, scan);
  rep.maximizer_x = -rep.maximizer_x;
  if (rep.zero_interval) {
    rep.zero_interval = std::make_pair(-rep.zero_interval->second, -rep.zero_interval->first);
  }
  return rep;
}

CriterionReport muckenhoupt_poincare(const LogConcaveMeasure& m, SupScan scan) {
  if (!(m.trunc() >= 1e-6)) {
    throw PreconditionError("truncation point below 1e-6: measure is close to a point mass");
  }
  const ScalarMap dens = [&m](double x) { return m.density(x); };
  const auto right = hardy_constant(dens, dens, Side::right, m.trunc(), scan);
  const auto left = hardy_constant(dens, dens, Side::left, m.trunc(), scan);
  CriterionReport rep = right.value >= left.value ? right : left;
  rep.kind = CriterionKind::poincare;
  rep.extra["B_plus"] = right.value;
  rep.extra["B_minus"] = left.value;
  rep.finite = right.finite && left.finite;
  rep.value = std::max(right.value, left.value);
  rep.bracket_low = rep.value;
  rep.bracket_high = 4.0 * rep.value;
  return rep;
}

namespace {

struct BrSide {
  SupOutcome small;  // log(1 + 1 / (2T))
  SupOutcome large;  // log(1 + e^2 / T)
  double witness_sup = 0.0;
  double witness_end = 0.0;
  double witness_slope = 0.0;
};

BrSide barthe_roberto_side(const LogConcaveMeasure& m, double big_m, bool right,
                           const SupScan& scan) {
  const Potential& p = m.potential();
  const double sign = right ? 1.0 : -1.0;
  const double z = m.z_norm();
  const ScalarMap weight = [&](double t) {
    const double x = sign * t;
    const double h = h_weight(p, big_m, x);
    if (!(h > 0.0)) {
      std::ostringstream msg;
      msg << "h vanishes at x = " << x << ": inner integral diverges";
      throw NumericalError(msg.str());
    }
    return z * std::exp(p(x)) / h;
  };
  const ScalarMap tail = [&](double t) {
    return right ? m.tail(t) : m.cdf(-t);
  };
  const auto xs = log_grid_per_decade(scan.x_min, scan.x_scan, scan.points_per_decade, 16);
  const std::size_t n = xs.size();
  std::vector<double> inner(n), tails(n);
  inner[0] = integrate_graded(weight, 0.0, xs[0], 1, 40);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    inner[i + 1] = inner[i] + integrate(weight, xs[i], xs[i + 1], 1);
  }
  for (std::size_t i = 0; i < n; ++i) tails[i] = tail(xs[i]);

  const auto obj_small = [](double t, double in) { return t * std::log1p(1.0 / (2.0 * t)) * in; };
  const auto obj_large = [](double t, double in) {
    return t * std::log1p(std::exp(2.0) / t) * in;
  };
  std::vector<double> vs(n), vl(n);
  for (std::size_t i = 0; i < n; ++i) {
    vs[i] = obj_small(tails[i], inner[i]);
    vl[i] = obj_large(tails[i], inner[i]);
  }
  const auto at_inner = [&](double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (i + 1 >= n) i = n - 2;
    return inner[i] + integrate(weight, xs[i], x, 1);
  };
  BrSide out;
  out.small = grid_sup(xs, vs, [&](double x) { return obj_small(tail(x), at_inner(x)); }, scan);
  out.large = grid_sup(xs, vl, [&](double x) { return obj_large(tail(x), at_inner(x)); }, scan);

  // K (x Phi' / Phi)^2 along the grid beyond M: flat when the large-x
  // profile is bounded
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (xs[i] >= big_m) {
      first = i;
      break;
    }
  }
  if (first + 1 < n) {
    std::vector<double> w;
    std::vector<double> wx;
    for (std::size_t i = first; i < n; ++i) {
      const double x = sign * xs[i];
      const double r = x * p.derivative(x) / p(x);
      w.push_back(vl[i] * r * r);
      wx.push_back(xs[i]);
    }
    out.witness_sup = *std::max_element(w.begin(), w.end());
    out.witness_end = w.back();
    std::size_t j0 = 0;
    while (j0 + 1 < wx.size() && wx[j0] < wx.back() / scan.trend_window) ++j0;
    if (j0 + 1 >= wx.size()) j0 = wx.size() - 2;
    out.witness_slope = log_slope(wx[j0], w[j0], wx.back(), w.back());
  }
  return out;
}

}  // namespace

CriterionReport barthe_roberto(const LogConcaveMeasure& m, double big_m,
                               SupScan scan) {
  if (!(big_m > 0.0)) throw PreconditionError("barthe_roberto needs M > 0");
  const Potential& p = m.potential();
  if (scan.x_scan <= 0.0) scan.x_scan = p.truncation_point(30.0);
  if (scan.x_scan > m.trunc()) {
    throw PreconditionError("barthe_roberto scan must stay inside the truncation point");
  }
  if (scan.x_min <= 0.0) scan.x_min = 1e-6 * scan.x_scan;
  const auto plus = barthe_roberto_side(m, big_m, true, scan);
  const auto minus = barthe_roberto_side(m, big_m, false, scan);

  CriterionReport rep;
  rep.kind = CriterionKind::barthe_roberto;
  const auto n = log_grid_per_decade(scan.x_min, scan.x_scan, scan.points_per_decade, 16).size();
  rep.grid_spec = describe_grid(scan.x_min, scan.x_scan, scan.points_per_decade, n,
                                scan.trend_window);
  rep.extra["b_plus"] = plus.small.value;
  rep.extra["b_minus"] = minus.small.value;
  rep.extra["B_plus"] = plus.large.value;
  rep.extra["B_minus"] = minus.large.value;
  rep.extra["witness_K"] = std::max(plus.witness_sup, minus.witness_sup);
  rep.extra["witness_end"] = plus.witness_end;
  rep.extra["witness_slope"] = plus.witness_slope;
  rep.bracket_low = std::max(plus.small.value, minus.small.value);
  rep.bracket_high = std::max(plus.large.value, minus.large.value);
  rep.value = rep.bracket_high;
  const SupOutcome& top = plus.large.value >= minus.large.value ? plus.large : minus.large;
  rep.maximizer_x = plus.large.value >= minus.large.value ? top.argmax : -top.argmax;
  rep.trend = top.trend;
  rep.trend_slope = top.slope;
  rep.finite = std::isfinite(rep.bracket_high);
  return rep;
}

CriterionReport bakry_emery(const Potential& p, std::size_t points) {
  if (!p.has_second_derivative()) {
    throw PreconditionError("bakry_emery needs the second derivative of Phi");
  }
  if (points < 16) throw PreconditionError("bakry_emery needs >= 16 grid points");
  const double x_hi = 10.0 * p.truncation_point(40.0);
  std::vector<double> xs = {0.0};
  const auto tail = log_grid(1e-6 * x_hi, x_hi, points - 1);
  xs.insert(xs.end(), tail.begin(), tail.end());
  std::size_t best = 0;
  std::vector<double> v(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    v[i] = p.second_derivative(xs[i]);
    if (std::isnan(v[i])) throw NumericalError("Phi'' is NaN on the grid");
    if (v[i] < v[best]) best = i;
  }
  CriterionReport rep;
  rep.kind = CriterionKind::bakry_emery;
  std::ostringstream os;
  os << "{0} + log grid [" << tail.front() << ", " << x_hi << "], " << xs.size() << " points";
  rep.grid_spec = os.str();
  const double lam = v[best];
  rep.value = lam;
  rep.maximizer_x = xs[best];
  rep.extra["lambda"] = lam;
  const bool at_end_decreasing = best + 1 == xs.size() && v[best] < v[best - 1];
  rep.trend = at_end_decreasing ? Trend::unbounded : Trend::interior;
  rep.trend_slope = log_slope(xs[xs.size() / 2], std::abs(v[xs.size() / 2]), xs.back(),
                              std::abs(v.back()));
  if (lam > 0.0 && !at_end_decreasing) {
    rep.bracket_low = 0.0;
    rep.bracket_high = 2.0 / lam;
    rep.extra["lsi_upper"] = 2.0 / lam;
  } else {
    rep.applicable = false;
    rep.finite = false;
    rep.bracket_low = 0.0;
    rep.bracket_high = kInf;
  }
  return rep;
}

double perturbation_bound(double a_const, double osc_h) {
  if (!(osc_h >= 0.0)) throw PreconditionError("perturbation_bound needs osc(h) >= 0");
  if (!(a_const >= 0.0)) throw PreconditionError("perturbation_bound needs A >= 0");
  return a_const * std::exp(2.0 * osc_h);
}

double perturbation_bound(const BestConstantReport& report, double osc_h) {
  return perturbation_bound(report.best_ratio, osc_h);
}

}  // namespace logsob
