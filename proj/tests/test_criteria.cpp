#include <doctest.h>

#include <cmath>
#include <random>

#include "logsob/criteria.hpp"
#include "oracles.hpp"

using namespace logsob;

namespace {

const LogConcaveMeasure& m15() {
  static const auto m = normalize(make_builtin(Family::power, 1.5));
  return m;
}

// Random piecewise-linear f on [0, 8] with f(0) = 0, extended flat.
TestFunction random_pl(std::mt19937_64& eng, bool pinned) {
  std::vector<double> xs = {0.0}, ys = {pinned ? 0.0 : 2.0 * uniform_open01(eng) - 1.0};
  double x = 0.0;
  const int knots = 3 + static_cast<int>(uniform_open01(eng) * 6);
  for (int k = 0; k < knots; ++k) {
    x += 0.2 + 1.5 * uniform_open01(eng);
    xs.push_back(x);
    ys.push_back(4.0 * uniform_open01(eng) - 2.0);
  }
  if (!pinned) {
    // mirror onto the negative half-line as well
    std::vector<double> nx, ny;
    for (std::size_t i = xs.size(); i-- > 1;) {
      nx.push_back(-xs[i]);
      ny.push_back(4.0 * uniform_open01(eng) - 2.0);
    }
    nx.insert(nx.end(), xs.begin(), xs.end());
    ny.insert(ny.end(), ys.begin(), ys.end());
    return TestFunction::piecewise_linear(nx, ny);
  }
  return TestFunction::piecewise_linear(xs, ys);
}

double integrate_with_kinks(const ScalarMap& g, const std::vector<double>& kinks, double lo,
                            double hi) {
  std::vector<double> cuts = {lo};
  for (const double k : kinks) {
    if (k > lo && k < hi) cuts.push_back(k);
  }
  cuts.push_back(hi);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += integrate(g, cuts[i], cuts[i + 1], 64);
  return s;
}

}  // namespace

TEST_CASE("Hardy constant for mu = nu = e^-x") {
  const ScalarMap e = [](double x) { return std::exp(-x); };
  const auto r = hardy_constant(e, e, Side::right, 60.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.bracket_high == 4.0 * r.bracket_low);
  CHECK(r.finite);
  CHECK(r.trend == Trend::plateau);
  CHECK(std::isinf(r.maximizer_x));
  const ScalarMap el = [](double x) { return std::exp(x); };
  const auto l = hardy_constant(el, el, Side::left, 60.0);
  CHECK(l.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Hardy constant for the Gaussian half-line is stable under grid doubling") {
  const ScalarMap g = [](double x) { return std::exp(-x * x) / std::sqrt(oracle::kPi); };
  SupScan coarse, fine;
  fine.points_per_decade = 200;
  const auto a = hardy_constant(g, g, Side::right, 8.0, coarse);
  const auto b = hardy_constant(g, g, Side::right, 8.0, fine);
  CHECK(a.finite);
  CHECK(a.trend == Trend::interior);
  CHECK(std::abs(a.value - b.value) <= 0.01 * b.value);
}

TEST_CASE("Hardy constant is infinite when nu vanishes on an interval") {
  const ScalarMap mu = [](double x) { return std::exp(-x); };
  const ScalarMap nu = [](double x) { return (x >= 1.0 && x <= 2.0) ? 0.0 : std::exp(-x); };
  const auto r = hardy_constant(mu, nu, Side::right, 30.0);
  CHECK_FALSE(r.finite);
  CHECK(std::isinf(r.value));
  REQUIRE(r.zero_interval.has_value());
  CHECK(r.zero_interval->first >= 1.0);
  CHECK(r.zero_interval->second <= 2.0);
  CHECK(r.zero_interval->second - r.zero_interval->first > 0.5);
}

TEST_CASE("Hardy bracket holds for random piecewise-linear functions") {
  const ScalarMap e = [](double x) { return std::exp(-x); };
  const auto r = hardy_constant(e, e, Side::right, 60.0);
  std::mt19937_64 eng(2024);
  for (int k = 0; k < 50; ++k) {
    const auto f = random_pl(eng, true);
    const auto kinks = f.kinks();
    const double lhs = integrate_with_kinks([&](double x) { return f(x) * f(x) * e(x); }, kinks, 0.0, 60.0);
    const double rhs = integrate_with_kinks(
        [&](double x) { return f.derivative(x) * f.derivative(x) * e(x); }, kinks, 0.0, 60.0);
    CHECK(4.0 * r.value * rhs - lhs >= -1e-8);
  }
}

TEST_CASE("Muckenhoupt Poincare brackets") {
  const auto lap = normalize(make_builtin(Family::power, 1.0));
  const auto r = muckenhoupt_poincare(lap);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.bracket_low <= 4.0);
  CHECK(r.bracket_high >= 4.0 * (1.0 - 1e-6));
  CHECK(r.extra.at("B_plus") == doctest::Approx(r.extra.at("B_minus")).epsilon(1e-9));

  // Gaussian e^{-x^2}: Poincare constant 1/2
  const auto g = muckenhoupt_poincare(normalize(make_builtin(Family::power, 2.0)));
  CHECK(g.finite);
  CHECK(g.bracket_low <= 0.5);
  CHECK(g.bracket_high >= 0.5);

  const auto narrow = normalize(make_custom([](double x) { return 1e16 * x * x; },
                                            [](double x) { return 2e16 * x; }));
  CHECK_THROWS_AS(muckenhoupt_poincare(narrow), PreconditionError);
}

TEST_CASE("Barthe-Roberto constants") {
  const auto r = barthe_roberto(m15(), 1.0);
  CHECK(r.finite);
  CHECK(r.extra.at("b_plus") == doctest::Approx(r.extra.at("b_minus")).epsilon(1e-9));
  CHECK(r.extra.at("B_plus") == doctest::Approx(r.extra.at("B_minus")).epsilon(1e-9));
  CHECK(r.bracket_low <= r.bracket_high);
  CHECK(r.extra.at("witness_K") > 0.0);
  // bounded large-x profile: no growth over the last stretch
  CHECK(r.extra.at("witness_slope") <= 0.05);
  CHECK(r.extra.at("witness_end") <= r.extra.at("witness_K"));

  const auto lap = barthe_roberto(normalize(make_builtin(Family::power, 1.0)), 1.0);
  CHECK(lap.finite);
}

TEST_CASE("Barthe-Roberto bracket bounds the weighted log-Sobolev ratio") {
  const auto r = barthe_roberto(m15(), 1.0);
  const auto& p = m15().potential();
  std::mt19937_64 eng(99);
  for (int k = 0; k < 50; ++k) {
    const auto f = random_pl(eng, false);
    const auto kinks = f.kinks();
    const double ent = entropy(m15(), f);
    const ScalarMap g = [&](double x) {
      const double d = f.derivative(x);
      return d * d * h_weight(p, 1.0, x);
    };
    const double dir = m15().expect(g, kinks);
    CHECK(r.bracket_high * dir - ent >= -1e-8);
  }
}

TEST_CASE("criteria are stable under grid doubling") {
  SupScan fine;
  fine.points_per_decade = 200;
  const auto a = barthe_roberto(m15(), 1.0);
  const auto b = barthe_roberto(m15(), 1.0, fine);
  CHECK(std::abs(a.value - b.value) <= 0.01 * b.value);
  const auto c = muckenhoupt_poincare(m15());
  const auto d = muckenhoupt_poincare(m15(), fine);
  CHECK(std::abs(c.value - d.value) <= 0.01 * d.value);
}

TEST_CASE("Bakry-Emery curvature") {
  const auto g = bakry_emery(make_builtin(Family::power, 2.0));
  CHECK(g.applicable);
  CHECK(g.extra.at("lambda") == doctest::Approx(2.0));
  CHECK(g.bracket_high == doctest::Approx(1.0));
  const auto p = bakry_emery(make_builtin(Family::power, 1.5));
  CHECK_FALSE(p.applicable);
  const auto q = bakry_emery(make_custom([](double x) { return x * x + x * x * x * x; },
                                         [](double x) { return 2 * x + 4 * x * x * x; },
                                         [](double x) { return 2 + 12 * x * x; }));
  CHECK(q.applicable);
  CHECK(q.extra.at("lambda") == doctest::Approx(2.0));
  CHECK(q.bracket_high == doctest::Approx(1.0));
  CHECK_THROWS_AS(bakry_emery(make_custom([](double x) { return x * x; }, [](double x) { return 2 * x; })),
                  PreconditionError);
}

TEST_CASE("perturbation bound") {
  CHECK(perturbation_bound(2.5, 0.0) == 2.5);
  CHECK(perturbation_bound(1.0, std::log(2.0)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(perturbation_bound(1.0, -0.1), PreconditionError);

  // bounded perturbation of the potential by 0.3 cos x: osc = 0.6
  const auto hf = build_H(LegendreEngine(make_builtin(Family::power, 1.5)), 1.0);
  const auto base = estimate_best_constant(m15(), hf, default_family(0));
  const auto tilted = normalize(make_custom(
      [](double x) { return std::pow(std::abs(x), 1.5) - 0.3 * std::cos(x); },
      [](double x) {
        const double s = x >= 0 ? 1.0 : -1.0;
        return 1.5 * s * std::sqrt(std::abs(x)) + 0.3 * std::sin(x);
      }));
  const auto pert = estimate_best_constant(tilted, hf, default_family(0));
  CHECK(pert.best_ratio <= 1.02 * perturbation_bound(base, 0.6));
}
