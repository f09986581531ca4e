#include "logsob/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "logsob/criteria.hpp"
#include "logsob/measure.hpp"

namespace logsob {

namespace {

constexpr double kSlack = 1e-9;

std::string grid_text(double lo, double hi, std::size_t n, const std::string& kind) {
  std::ostringstream os;
  os << kind << " grid [" << lo << ", " << hi << "], " << n << " points";
  return os.str();
}

// Keeps at most a handful of witnesses so verdicts stay readable.
void add_witness(std::vector<double>& w, double x) {
  if (w.size() < 32) w.push_back(x);
}

}  // namespace

const FoundConstant& LemmaVerdict::constant(const std::string& name) const {
  for (const auto& c : found_constants) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no constant named " + name + " in " + lemma);
}

std::optional<double> grid_constant(double required, double cap) {
  if (!(required > 0.0)) return std::pow(2.0, -20.0);
  if (!std::isfinite(required)) return std::nullopt;
  const double k = std::ceil(16.0 * std::log2(required * (1.0 - kSlack)));
  double v = std::pow(2.0, k / 16.0);
  if (v < required * (1.0 - kSlack)) v = std::pow(2.0, (k + 1.0) / 16.0);
  if (v > cap) return std::nullopt;
  return v;
}

LemmaVerdict verify_lem_av(const Potential& p, const HypothesisReport& rep,
                           double cap) {
  if (!rep.passed) {
    throw PreconditionError("verify_lem_av needs a passed (H) report: " + rep.reason);
  }
  const double eps = rep.epsilon;
  const double big_m = rep.big_m;
  LegendreEngine e(p);
  const double x0 = std::max(1.0, p.derivative(big_m));
  double x_hi = p.derivative(rep.grid.hi);
  if (!(x_hi > 10.0 * x0)) x_hi = 1e3 * x0;
  const auto xs = log_grid_per_decade(x0, x_hi, 200, 201);

  LemmaVerdict v;
  v.lemma = "lem_av";
  v.grid_spec = grid_text(x0, x_hi, xs.size(), "log");
  double need1 = 0.0, need3 = 1.0;
  double star_low = kInf, star_high = kInf;
  std::vector<double> r1(xs.size()), r3(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double y = e.invert_derivative(x);
    const double conj = x * y - p(y);
    const double py = p(y);
    r1[i] = x * x / conj;
    const double q = conj / x;
    r3[i] = std::max(y / q, q / y);
    need1 = std::max(need1, r1[i]);
    need3 = std::max(need3, r3[i]);
    const double ratio = conj / py;
    star_low = std::min(star_low, ratio - eps);
    star_high = std::min(star_high, (1.0 - eps) - ratio);
    if (ratio < eps * (1.0 - kSlack) || ratio > (1.0 - eps) * (1.0 + kSlack)) {
      add_witness(v.violation_points, x);
    }
  }
  const double cand1 = (2.0 - eps) * (2.0 - eps) * rep.growth_m2 * std::pow(big_m, -eps) / eps;
  const double cand3 = (1.0 + eps) / eps;
  const auto c1 = grid_constant(need1, cap);
  const auto c3 = grid_constant(need3, cap);
  if (!c1) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (r1[i] > cap) add_witness(v.violation_points, xs[i]);
    }
  }
  if (!c3) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (r3[i] > cap) add_witness(v.violation_points, xs[i]);
    }
  }
  v.found_constants.push_back({"C_lem1", c1.value_or(kInf), cand1});
  v.found_constants.push_back({"C_lem3", c3.value_or(kInf), cand3});
  v.found_constants.push_back({"star_lower_margin", star_low, std::nullopt});
  v.found_constants.push_back({"star_upper_margin", star_high, std::nullopt});
  v.found_constants.push_back({"threshold_x", x0, std::nullopt});
  v.passed = v.violation_points.empty();
  return v;
}

LemmaVerdict verify_scalar_decomposition(DecompositionVariant variant,
                                         double a_lambda, double x_max,
                                         std::size_t points) {
  if (variant == DecompositionVariant::a_lambda && !(a_lambda >= 2.0)) {
    throw PreconditionError("scalar decomposition needs A_lambda >= 2");
  }
  if (points < 2 || !(x_max > 0.0)) throw PreconditionError("bad decomposition grid");
  const double shift = variant == DecompositionVariant::two ? 2.0 : std::sqrt(a_lambda);
  const auto xlogx = [](double x) { return x == 0.0 ? 0.0 : x * x * std::log(x * x); };
  const auto xs = linspace(0.0, x_max, points);

  LemmaVerdict v;
  v.lemma = variant == DecompositionVariant::two ? "scalar_decomposition_two"
                                                 : "scalar_decomposition_a_lambda";
  v.grid_spec = grid_text(0.0, x_max, points, "uniform");

  // A needed at x: (x^2 log x^2 - x^2 + 1 - (x - s)_+^2 log (x - s)_+^2) / (x - 1)^2
  double need = 0.0;
  for (const double x : xs) {
    if (std::abs(x - 1.0) < 1e-6) continue;
    const double rest = xlogx(x) - (x * x - 1.0) - xlogx(std::max(x - shift, 0.0));
    need = std::max(need, rest / ((x - 1.0) * (x - 1.0)));
  }
  double a = 5.0;
  if (variant == DecompositionVariant::a_lambda) {
    a = std::max(0.0, std::ceil(need - kSlack));
    if (a > 1e6) {
      v.note = "no integer A <= 1e6";
      a = 1e6;
    }
  }
  for (const double x : xs) {
    const double lhs = xlogx(x);
    const double rhs = a * (x - 1.0) * (x - 1.0) + x * x - 1.0 +
                       xlogx(std::max(x - shift, 0.0));
    if (lhs > rhs + kSlack * std::max(1.0, std::abs(lhs))) add_witness(v.violation_points, x);
  }
  v.found_constants.push_back({"A", a, variant == DecompositionVariant::two
                                           ? std::optional<double>(5.0)
                                           : std::nullopt});
  v.found_constants.push_back({"A_required", need, std::nullopt});
  v.found_constants.push_back({"shift", shift, std::nullopt});
  v.passed = v.violation_points.empty() && v.note.empty();
  return v;
}

namespace {

// tau*(s) over a table (y_j, tau_j): max_j s y_j - tau_j.
double table_conjugate(const std::vector<double>& y, const std::vector<double>& t,
                       double s) {
  double best = -kInf;
  for (std::size_t j = 0; j < y.size(); ++j) best = std::max(best, s * y[j] - t[j]);
  return best;
}

// Closed-form tau*(x^2) / Phi*(C x) for the power family: both sides are
// multiples of x^{alpha/(alpha-1)} once the sup sits on the y >= m branch.
std::optional<double> power_tau_candidate(const Potential& p, double c_h, double c) {
  if (p.family() != Family::power) return std::nullopt;
  const double alpha = p.alpha();
  if (!(alpha > 1.0 && alpha < 2.0)) return std::nullopt;
  const double pw = alpha / (2.0 - alpha);
  const double k = 8.0 * c_h;
  const double tau_coef = (pw - 1.0) / pw * std::pow(k / pw, 1.0 / (pw - 1.0));
  const double b = alpha / (alpha - 1.0);
  const double phi_coef = (alpha - 1.0) * std::pow(alpha, -b) * std::pow(c, b);
  return tau_coef / phi_coef;
}

// Smallest admissible u0 for the power family. Below m the requirement
// K^2 s m^(p-1) / L decreases in L = log x; above m it is the constant
// K^2 (s / L)^(1/p), since K^2 grows exactly like L^(1/p). The sup is
// therefore the larger of the value at A_lambda and that constant.
std::optional<double> power_tau2_candidate(const Potential& p, double m, double lam,
                                           double eps) {
  if (p.family() != Family::power) return std::nullopt;
  const double alpha = p.alpha();
  if (!(alpha > 1.0 && alpha < 2.0)) return std::nullopt;
  const double b = alpha / (alpha - 1.0);
  const double c = (alpha - 1.0) * std::pow(alpha, -b);
  const double q = 2.0 / b;
  const double pw = alpha / (2.0 - alpha);
  const double s = (1.0 - eps) / (2.0 * lam);
  const auto k2 = [&](double l) { return 2.0 * l * std::pow(c / (2.0 * lam * l), q); };
  const double flat = k2(1.0) * std::pow(s, 1.0 / pw);
  const double l_a = c / lam;
  double edge = k2(l_a) * s * std::pow(m, pw - 1.0) / l_a;
  if (k2(l_a) / edge > m) edge = k2(l_a) * std::pow(s / l_a, 1.0 / pw);
  return std::max(flat, edge);
}

}  // namespace

LemmaVerdict verify_legendre_tau(const Potential& p, double big_m, double c_h,
                                 double cap) {
  const TauFunction tau = make_tau(p, big_m, c_h);
  LegendreEngine e(p);
  const double m = tau.m();
  const double x_top_phi = p.truncation_point(1e6);
  const double y_top = std::max(h_weight(p, big_m, x_top_phi), m);

  constexpr std::size_t kTable = 4096;
  constexpr std::size_t kLinear = 64;
  std::vector<double> ys = linspace(0.0, m, kLinear);
  if (y_top > m * (1.0 + 1e-12)) {
    const auto geo = log_grid(m, y_top, kTable - kLinear + 1);
    ys.insert(ys.end(), geo.begin() + 1, geo.end());
  }
  std::vector<double> ts(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) ts[j] = tau(ys[j]);
  double modulus = 0.0;
  for (std::size_t j = 1; j < ys.size(); ++j) modulus = std::max(modulus, ys[j] - ys[j - 1]);

  // keep x where the conjugate's argmax stays inside the table
  const std::size_t nt = ys.size();
  const double last_slope = (ts[nt - 1] - ts[nt - 2]) / (ys[nt - 1] - ys[nt - 2]);
  const double x_top = std::sqrt(0.5 * last_slope);
  const double d_const = 1.0;
  std::vector<double> xs = {0.0};
  const auto lg = log_grid(1e-3, std::max(x_top, 10.0 * d_const), 400);
  xs.insert(xs.end(), lg.begin(), lg.end());
  std::vector<double> conj(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) conj[i] = table_conjugate(ys, ts, xs[i] * xs[i]);

  LemmaVerdict v;
  v.lemma = "legendre_tau";
  {
    std::ostringstream os;
    os << "tau table: " << nt << " points on [0, " << y_top << "] (" << kLinear
       << " uniform on [0, m = " << m << "]), max spacing " << modulus << "; x grid "
       << xs.size() << " points on [0, " << xs.back() << "]";
    v.grid_spec = os.str();
  }
  if (std::abs(conj[0]) > 1e-12) add_witness(v.violation_points, 0.0);

  double need_b = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] <= d_const) need_b = std::max(need_b, conj[i] / (xs[i] * xs[i]));
  }
  double c = 1.0;
  double need_a = kInf;
  for (int k = 0; k <= 40; ++k, c *= 2.0) {
    need_a = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] < d_const) continue;
      double rhs = 0.0;
      try {
        rhs = e.legendre(c * xs[i]);
      } catch (const NumericalError&) {
        rhs = kInf;
      }
      need_a = std::max(need_a, conj[i] / rhs);
    }
    if (need_a <= cap) break;
  }
  const auto a = grid_constant(need_a, cap);
  const auto b = grid_constant(need_b, cap);
  if (!a || !b) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] >= d_const) add_witness(v.violation_points, xs[i]);
    }
  }

  std::optional<double> cand_a = power_tau_candidate(p, c_h, c);
  if (!cand_a) {
    // exact conjugate of tau by golden section on a sparse x grid
    double best = 0.0;
    for (const double x : log_grid(d_const, std::max(x_top, 2.0 * d_const), 48)) {
      const double s = x * x;
      const double t_star = numeric_conjugate([&tau](double y) { return tau(y); }, s, y_top);
      double rhs = kInf;
      try {
        rhs = e.legendre(c * x);
      } catch (const NumericalError&) {
      }
      best = std::max(best, t_star / rhs);
    }
    cand_a = best;
  }
  v.found_constants.push_back({"A", a.value_or(kInf), cand_a});
  v.found_constants.push_back({"B", b.value_or(kInf), std::nullopt});
  v.found_constants.push_back({"C", c, std::nullopt});
  v.found_constants.push_back({"D", d_const, std::nullopt});
  v.found_constants.push_back({"tau_star_at_0", conj[0], std::nullopt});
  v.found_constants.push_back({"table_spacing", modulus, std::nullopt});
  v.passed = v.violation_points.empty();
  return v;
}

LemmaVerdict verify_tau2(const Potential& p, double big_m, double lam,
                         double eps, double a_lambda, double cap) {
  if (!(a_lambda >= 1.0)) throw PreconditionError("verify_tau2 needs A_lambda >= 1");
  const TauFunction tau2 = make_tau2(p, big_m, lam, eps);
  LegendreEngine e(p);
  const double x_lo = std::max(a_lambda, 1.0 + 1e-6);
  const auto xs = log_grid_per_decade(x_lo, std::max(1e8, 10.0 * x_lo), 100, 101);
  std::vector<double> k2(xs.size()), rhs(xs.size());
  double k2_max = 0.0;
  double x_at_max = xs.front();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double kw = k_weight(e, lam, xs[i]);
    k2[i] = kw * kw;
    rhs[i] = 0.5 * std::log(xs[i] * xs[i]);
    if (k2[i] > k2_max) {
      k2_max = k2[i];
      x_at_max = xs[i];
    }
  }
  const auto holds = [&](double u0) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (tau2(k2[i] / u0) > rhs[i] * (1.0 + kSlack)) return false;
    }
    return true;
  };

  LemmaVerdict v;
  v.lemma = "tau2";
  v.grid_spec = grid_text(xs.front(), xs.back(), xs.size(), "log");
  const int k_lo = -16 * 40;
  const int k_hi = static_cast<int>(std::floor(16.0 * std::log2(cap) + 1e-9));
  std::optional<double> candidate = power_tau2_candidate(p, tau2.m(), lam, eps);
  if (!candidate) {
    // exact inversion of tau2 on every 8th grid point
    const auto inverse = [&tau2](double target) {
      double lo = 0.0, hi = 1.0;
      while (tau2(hi) < target) hi *= 2.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (tau2(mid) <= target ? lo : hi) = mid;
      }
      return lo;
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); i += 8) worst = std::max(worst, k2[i] / inverse(rhs[i]));
    candidate = worst;
  }
  if (!holds(std::pow(2.0, k_hi / 16.0))) {
    const double u0 = std::pow(2.0, k_hi / 16.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (tau2(k2[i] / u0) > rhs[i] * (1.0 + kSlack)) add_witness(v.violation_points, xs[i]);
    }
    v.found_constants.push_back({"u0", kInf, candidate});
  } else {
    // admissibility is monotone in u0: bisect on the exponent
    int lo = k_lo, hi = k_hi;
    if (holds(std::pow(2.0, lo / 16.0))) hi = lo;
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      if (holds(std::pow(2.0, mid / 16.0))) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    v.found_constants.push_back({"u0", std::pow(2.0, hi / 16.0), candidate});
  }
  v.found_constants.push_back({"K2_max", k2_max, std::nullopt});
  v.found_constants.push_back({"x_at_K2_max", x_at_max, std::nullopt});
  v.found_constants.push_back({"A_lambda", a_lambda, std::nullopt});
  v.passed = v.violation_points.empty();
  return v;
}

LemmaVerdict verify_psi_shape(const Potential& p, double lam, PsiScan scan) {
  LegendreEngine e(p);
  LemmaVerdict v;
  v.lemma = "psi_shape";
  double a = 0.0;
  try {
    a = find_A_lambda(e, lam, scan);
  } catch (const NumericalError& err) {
    v.note = err.what();
    v.violation_points.push_back(scan.x_hi);
    v.grid_spec = grid_text(1.0, scan.x_hi, 0, "log");
    return v;
  }
  const auto xs = log_grid_per_decade(a, scan.x_hi, scan.points_per_decade, 101);
  v.grid_spec = grid_text(a, scan.x_hi, xs.size(), "log");
  std::vector<double> ps(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ps[i] = psi(e, lam, xs[i]);
  const double psi_a = ps.front();
  if (psi_a < 1.0 - 1e-9) add_witness(v.violation_points, a);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    bool bad = !(ps[i] > 0.0);
    if (i >= 1 && !(ps[i] > ps[i - 1])) bad = true;
    if (i >= 2) {
      const double s1 = (ps[i] - ps[i - 1]) / (xs[i] - xs[i - 1]);
      const double s0 = (ps[i - 1] - ps[i - 2]) / (xs[i - 1] - xs[i - 2]);
      if (s1 - s0 > 1e-12 * std::max(1.0, std::abs(s0))) bad = true;
    }
    if (bad) add_witness(v.violation_points, xs[i]);
  }
  // g'/g with g = (Phi*)^-1: g'(z) = 1 / (Phi*)'(g(z)) = 1 / Phi'^-1(g(z))
  const auto est = [&](double x) {
    const double g = e.legendre_inverse(lam * std::log(x));
    return 1.0 / (g * e.invert_derivative(g));
  };
  const double r_start = est(scan.x_hi / 10.0);
  const double r_end = est(scan.x_hi);
  if (!(r_end < r_start)) {
    add_witness(v.violation_points, scan.x_hi);
    v.note = "g'/g does not decrease over the last decade";
  }
  std::optional<double> cand;
  if (p.family() == Family::power && p.alpha() > 1.0) {
    const double al = p.alpha();
    cand = std::exp((al - 1.0) * std::pow(al, -al / (al - 1.0)) / lam);
  }
  v.found_constants.push_back({"A_lambda", a, cand});
  v.found_constants.push_back({"psi_at_A", psi_a, std::nullopt});
  v.found_constants.push_back({"est_ratio_decade_start", r_start, std::nullopt});
  v.found_constants.push_back({"est_ratio_end", r_end, std::nullopt});
  v.passed = v.violation_points.empty();
  return v;
}

LemmaParams default_lemma_params(const Potential& p) {
  LemmaParams lp;
  switch (p.family()) {
    case Family::power:
      lp.epsilon = std::min({p.alpha() - 1.0, 2.0 - p.alpha(), 0.5});
      lp.big_m = 1.0;
      break;
    case Family::power_log:
      lp.epsilon = 0.15;
      lp.big_m = 1.0;
      break;
    case Family::custom:
      break;
  }
  return lp;
}

std::vector<LemmaVerdict> run_lemma_battery(const Potential& p, LemmaParams params) {
  if (!(params.epsilon > 0.0) || !(params.big_m > 0.0)) {
    throw PreconditionError("lemma battery needs epsilon > 0 and M > 0");
  }
  const auto rep = check_hypothesis_H(p, params.epsilon, params.big_m);
  if (!rep.passed) {
    throw PreconditionError("hypothesis (H) fails: " + rep.reason);
  }
  double c_h = params.c_h;
  if (!(c_h > 0.0)) {
    const auto m = normalize(p);
    c_h = barthe_roberto(m, params.big_m).bracket_high;
  }
  std::vector<LemmaVerdict> out;
  out.push_back(verify_lem_av(p, rep, params.cap));
  out.push_back(verify_scalar_decomposition(DecompositionVariant::two));
  out.push_back(verify_legendre_tau(p, params.big_m, c_h, params.cap));
  auto shape = verify_psi_shape(p, params.lam);
  double a_lambda = 0.0;
  for (const auto& c : shape.found_constants) {
    if (c.name == "A_lambda") a_lambda = c.value;
  }
  out.push_back(shape);
  if (a_lambda >= 1.0) {
    out.push_back(verify_tau2(p, params.big_m, params.lam, params.epsilon, a_lambda,
                              std::min(params.cap, 1e3)));
    out.push_back(verify_scalar_decomposition(DecompositionVariant::a_lambda,
                                              std::max(2.0, a_lambda)));
  }
  for (auto& v : out) {
    if (v.lemma == "legendre_tau") {
      v.found_constants.push_back({"C_h", c_h, std::nullopt});
    }
  }
  return out;
}

}  // namespace logsob
