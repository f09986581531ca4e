#include <doctest.h>

#include <cmath>

#include "logsob/convex.hpp"
#include "oracles.hpp"

using namespace logsob;

namespace {

const Potential& quad() {
  static const Potential p = make_builtin(Family::power, 2.0);
  return p;
}
const Potential& p15() {
  static const Potential p = make_builtin(Family::power, 1.5);
  return p;
}

}  // namespace

TEST_CASE("invert_derivative closed forms") {
  LegendreEngine q(quad()), e(p15());
  CHECK(q.invert_derivative(3.0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(e.invert_derivative(3.0) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(q.invert_derivative(0.0) == 0.0);
  CHECK_THROWS_AS(q.invert_derivative(-1.0), PreconditionError);
  CHECK_THROWS_AS(q.invert_derivative(std::nan("")), PreconditionError);
  for (const double y : log_grid(1e-3, 1e4, 50)) {
    const double x = e.invert_derivative(y);
    CHECK(std::abs(p15().derivative(x) - y) <= 1e-10 * (1.0 + y) * 10.0);
  }
}

TEST_CASE("legendre transform closed forms") {
  LegendreEngine q(quad()), e(p15());
  CHECK(q.legendre(3.0) == doctest::Approx(2.25).epsilon(1e-9));
  CHECK(e.legendre(3.0) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(e.legendre(-3.0) == e.legendre(3.0));
  CHECK(q.legendre(0.0) == 0.0);
  CHECK(LegendreEngine(make_builtin(Family::power_log, 1.5, 1.0)).legendre(0.0) == 0.0);
}

TEST_CASE("power family conjugate matches the closed form to 1e-8") {
  for (const double alpha : {1.2, 1.5, 1.8}) {
    LegendreEngine e(make_builtin(Family::power, alpha));
    for (const double y : log_grid(1e-2, 1e3, 40)) {
      CAPTURE(alpha);
      CAPTURE(y);
      CHECK(e.legendre(y) == doctest::Approx(oracle::power_conjugate(alpha, y)).epsilon(1e-8));
    }
  }
}

TEST_CASE("Young inequality, convexity and biconjugacy on a grid") {
  for (const auto& p : {p15(), make_builtin(Family::power_log, 1.5, 1.0)}) {
    LegendreEngine e(p);
    const auto grid = linspace(-8.0, 8.0, 81);
    for (const double x : grid) {
      for (const double y : grid) CHECK(x * y <= p(x) + e.legendre(y) + 1e-9);
    }
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double mid = e.legendre(grid[i]);
      CHECK(mid <= 0.5 * (e.legendre(grid[i - 1]) + e.legendre(grid[i + 1])) + 1e-9);
    }
    const ScalarMap star = [&e](double y) { return e.legendre(y); };
    for (const double x : linspace(0.0, 5.0, 11)) {
      const double bi = numeric_conjugate(star, x, 1e3);
      CHECK(std::abs(bi - p(x)) <= 1e-6 * (1.0 + p(x)));
    }
  }
}

TEST_CASE("weight h") {
  CHECK(h_weight(p15(), 1.0, 0.5) == 1.0);
  CHECK(h_weight(p15(), 1.0, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(h_weight(quad(), 1.0, 10.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("H function for |x|^1.5 with B = 1") {
  LegendreEngine e(p15());
  const auto hf = build_H(e, 1.0);
  CHECK(hf.d_const() == doctest::Approx(6.75).epsilon(1e-8));
  CHECK(hf.continuous());
  CHECK(hf(2.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(hf(9.0) == doctest::Approx(108.0).epsilon(1e-8));
  CHECK(hf(-9.0) == hf(9.0));
  CHECK(hf(0.0) == 0.0);
  double prev = 0.0;
  for (const double x : linspace(0.0, 50.0, 2001)) {
    CHECK(hf(x) >= prev - 1e-12);
    prev = hf(x);
  }
}

TEST_CASE("H for the Gaussian with B = 2 is degenerate") {
  LegendreEngine q(quad());
  const auto hf = build_H(q, 2.0);
  CHECK(hf.degenerate());
  for (const double x : {0.5, 3.0, 40.0}) CHECK(hf(x) == doctest::Approx(x * x).epsilon(1e-9));
  CHECK_THROWS_AS(build_H(q, 0.0), PreconditionError);
  const auto plain = HFunction::quadratic();
  CHECK(plain.quadratic_only());
  CHECK(plain(7.0) == 49.0);
}

TEST_CASE("tau and tau2 for |x|^1.5 with M = 1") {
  const auto t = make_tau(p15(), 1.0, 1.0);
  CHECK(t.m() == doctest::Approx(1.0));
  CHECK(t(0.0) == 0.0);
  for (const double x : {1.0, 2.0, 3.5, 10.0}) {
    CHECK(t(x) == doctest::Approx(x * x * x / 8.0).epsilon(1e-9));
  }
  CHECK(tau2(p15(), 1.0, 1.0, 0.5, 2.0) == doctest::Approx(2.0).epsilon(1e-9));
  double prev = 0.0;
  for (const double x : linspace(0.0, 20.0, 401)) {
    CHECK(t(x) >= prev);
    prev = t(x);
  }
  CHECK_THROWS_AS(t(-1.0), PreconditionError);
  CHECK_THROWS_AS(make_tau(p15(), 1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(make_tau2(p15(), 1.0, 1.0, 1.5), PreconditionError);
}

TEST_CASE("psi, A_lambda and K for the Gaussian") {
  LegendreEngine q(quad());
  for (const double x : {1.5, 3.0, 100.0}) {
    CHECK(psi(q, 1.0, x) == doctest::Approx(4.0 * std::log(x)).epsilon(1e-8));
  }
  CHECK(find_A_lambda(q, 1.0) == doctest::Approx(std::exp(0.25)).epsilon(0.01));
  CHECK(find_A_lambda(q, 1.0) >= std::exp(0.25) * (1.0 - 1e-9));
  for (const double x : {2.0, 10.0, 1e3}) {
    CHECK(k_weight(q, 1.0, x) == doctest::Approx(0.5).epsilon(1e-8));
  }
  CHECK_THROWS_AS(psi(q, 1.0, 0.5), PreconditionError);
  CHECK_THROWS_AS(psi(q, 0.0, 2.0), PreconditionError);
}

TEST_CASE("k_weight equals one where psi(x^2) = log x^2") {
  // with lambda = 1/4, psi(x^2) = log x^2 for the Gaussian
  LegendreEngine q(quad());
  CHECK(k_weight(q, 0.25, 5.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("psi is increasing and concave beyond A_lambda") {
  for (const double alpha : {1.2, 1.5, 1.8}) {
    LegendreEngine e(make_builtin(Family::power, alpha));
    const double lam = 0.5;
    const double a = find_A_lambda(e, lam);
    CHECK(psi(e, lam, a) >= 1.0 - 1e-9);
    const auto xs = log_grid(a, 1e8, 500);
    for (std::size_t i = 2; i < xs.size(); ++i) {
      const double p0 = psi(e, lam, xs[i - 2]), p1 = psi(e, lam, xs[i - 1]), p2 = psi(e, lam, xs[i]);
      CHECK(p2 > p1);
      CHECK((p2 - p1) / (xs[i] - xs[i - 1]) <= (p1 - p0) / (xs[i - 1] - xs[i - 2]) + 1e-12);
    }
  }
}
