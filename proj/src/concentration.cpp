#include "logsob/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace logsob {

double herbst_inner(const HFunction& hf, double t) {
  if (!(t >= 0.0)) throw PreconditionError("herbst: t must be >= 0");
  const double core = 2.0 * hf.d_const();
  if (hf.quadratic_only() || t <= core) return 0.25 * t;
  double total = 0.25 * core;
  // geometric panels, ratio <= 2, on [2D, t]
  const auto panels = static_cast<std::size_t>(std::ceil(std::log2(t / core))) + 3;
  const double r = std::pow(t / core, 1.0 / static_cast<double>(panels));
  double a = core;
  for (std::size_t i = 0; i < panels; ++i) {
    const double b = i + 1 == panels ? t : a * r;
    total += integrate([&hf](double s) { return hf(0.5 * s) / (s * s); }, a, b, 1);
    a = b;
  }
  return total;
}

double herbst_G(double a_const, const HFunction& hf, double t, double lam) {
  if (!(a_const > 0.0)) throw PreconditionError("herbst: A must be > 0");
  if (t == 0.0) return 0.0;
  return a_const * t * herbst_inner(hf, t) - lam * t;
}

GMinimum minimize_G(double a_const, const HFunction& hf, double lam) {
  if (!(lam >= 0.0)) throw PreconditionError("minimize_G needs lam >= 0");
  if (!(a_const > 0.0)) throw PreconditionError("minimize_G needs A > 0");
  if (lam == 0.0) return {0.0, 0.0};
  const auto g = [&](double t) { return herbst_G(a_const, hf, t, lam); };
  // G is convex: once it stops decreasing along t = 2^k 1e-6 the minimum
  // lies between the previous two probes
  double prev = 0.0;
  double hi = 1e-6;
  double g_hi = g(hi);
  double lo = 0.0;
  for (;;) {
    const double next = 2.0 * hi;
    if (next > 1e6) {
      throw NumericalError("G still decreases at t = 1e6: lambda outside the certified range");
    }
    const double g_next = g(next);
    if (g_next >= g_hi) {
      lo = prev;
      hi = next;
      break;
    }
    prev = hi;
    hi = next;
    g_hi = g_next;
  }
  auto best = golden_section_min(g, lo, hi, 1e-13);
  if (best.value > 0.0) best = {0.0, 0.0};
  return {best.x, best.value};
}

double herbst_first_order_gap(double a_const, const HFunction& hf, double lam,
                              double t) {
  return lam * t - a_const * t * herbst_inner(hf, t) - a_const * hf(0.5 * t);
}

double laplace_bound(double a_const, const HFunction& hf, double t) {
  if (!(a_const > 0.0)) throw PreconditionError("laplace_bound needs A > 0");
  if (!(t >= 0.0)) throw PreconditionError("laplace_bound needs t >= 0");
  return std::exp(a_const * t * herbst_inner(hf, t));
}

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::sum: return "sum";
    case Statistic::mean: return "mean";
    case Statistic::sqrt_n: return "sqrt_n";
  }
  return "sum";
}

Statistic statistic_from_string(const std::string& name) {
  if (name == "sum") return Statistic::sum;
  if (name == "mean") return Statistic::mean;
  if (name == "sqrt_n") return Statistic::sqrt_n;
  throw PreconditionError("unknown statistic '" + name + "'");
}

namespace {

double sum_deviation(double lam, std::size_t n, Statistic stat) {
  const double dn = static_cast<double>(n);
  switch (stat) {
    case Statistic::sum: return lam;
    case Statistic::mean: return dn * lam;
    case Statistic::sqrt_n: return std::sqrt(dn) * lam;
  }
  return lam;
}

void check_bound_args(std::size_t n, double zeta, double lam) {
  if (n < 1) throw PreconditionError("tail bound needs n >= 1");
  if (!(zeta > 0.0)) throw PreconditionError("tail bound needs zeta > 0");
  if (!(lam >= 0.0)) throw PreconditionError("tail bound needs lam >= 0");
}

}  // namespace

TailBound tail_bound_detail(double a_const, const HFunction& hf, double lam,
                            std::size_t n, double zeta, Statistic stat) {
  check_bound_args(n, zeta, lam);
  const double s = sum_deviation(lam, n, stat);
  // G_n(t) = A n t I(t) - (s / zeta) t
  const auto mn = minimize_G(a_const * static_cast<double>(n), hf, s / zeta);
  TailBound out;
  out.raw = 2.0 * std::exp(mn.g_min);
  out.capped = std::min(1.0, out.raw);
  out.t_star = mn.t_star;
  out.gaussian = hf.quadratic_only() || mn.t_star <= 2.0 * hf.d_const();
  return out;
}

double tail_bound(double a_const, const HFunction& hf, double lam,
                  std::size_t n, double zeta) {
  return tail_bound_detail(a_const, hf, lam, n, zeta, Statistic::sum).raw;
}

double regime_split(double a_const, const HFunction& hf, std::size_t n,
                    double zeta, Statistic stat) {
  check_bound_args(n, zeta, 0.0);
  const double d = hf.quadratic_only() ? kInf : hf.d_const();
  const double dn = static_cast<double>(n);
  switch (stat) {
    case Statistic::sum: return a_const * dn * d * zeta;
    case Statistic::mean: return a_const * d * zeta;
    case Statistic::sqrt_n: return a_const * d * zeta * std::sqrt(dn);
  }
  return kInf;
}

double detect_regime_split(double a_const, const HFunction& hf, std::size_t n,
                           double zeta, Statistic stat,
                           const std::vector<double>& lam_grid) {
  const double an = a_const * static_cast<double>(n);
  for (const double lam : lam_grid) {
    const double s = sum_deviation(lam, n, stat) / zeta;
    const double gauss = -s * s / an;
    const auto mn = minimize_G(an, hf, s);
    if (std::abs(mn.g_min - gauss) > 1e-8 * std::max(1.0, std::abs(gauss))) return lam;
  }
  return kInf;
}

std::vector<DeviationRow> empirical_deviation(
    const LogConcaveMeasure& m, const ScalarMap& f, std::size_t n,
    const std::vector<double>& lam_grid, std::size_t trials, std::uint64_t seed,
    Statistic stat, unsigned threads) {
  if (trials < 100) throw PreconditionError("empirical_deviation needs >= 100 trials");
  if (n < 1) throw PreconditionError("empirical_deviation needs n >= 1");
  const double mean = m.expect(f);
  const double dn = static_cast<double>(n);
  const double scale = stat == Statistic::sum ? 1.0
                       : stat == Statistic::mean ? 1.0 / dn
                                                 : 1.0 / std::sqrt(dn);
  std::vector<double> dev(trials);
  parallel_for(trials, std::max(1u, threads), [&](std::size_t k) {
    std::mt19937_64 eng(stream_seed(seed, k));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(m.inverse_cdf(uniform_open01(eng))) - mean;
    dev[k] = std::abs(s) * scale;
  });
  std::vector<DeviationRow> rows;
  rows.reserve(lam_grid.size());
  const double dt = static_cast<double>(trials);
  for (const double lam : lam_grid) {
    std::size_t hits = 0;
    for (const double d : dev) hits += d > lam ? 1 : 0;
    const double p = static_cast<double>(hits) / dt;
    rows.push_back({lam, p, std::sqrt(p * (1.0 - p) / dt)});
  }
  return rows;
}

double tensorize(double a1, double a2) {
  if (!(a1 >= 0.0) || !(a2 >= 0.0)) throw PreconditionError("tensorize needs A >= 0");
  return std::max(a1, a2);
}

}  // namespace logsob
