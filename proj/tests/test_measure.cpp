#include <doctest.h>

#include <cmath>

#include "logsob/measure.hpp"
#include "oracles.hpp"

using namespace logsob;

namespace {

const LogConcaveMeasure& gauss() {
  static const auto m = normalize(make_builtin(Family::power, 2.0));
  return m;
}
const LogConcaveMeasure& laplace() {
  static const auto m = normalize(make_builtin(Family::power, 1.0));
  return m;
}
const LogConcaveMeasure& m15() {
  static const auto m = normalize(make_builtin(Family::power, 1.5));
  return m;
}

}  // namespace

TEST_CASE("normalizing constants") {
  CHECK(gauss().z_norm() == doctest::Approx(std::sqrt(oracle::kPi)).epsilon(1e-9));
  CHECK(laplace().z_norm() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(m15().z_norm() == doctest::Approx(oracle::power_z(1.5)).epsilon(1e-9));
  const auto pl = normalize(make_builtin(Family::power_log, 1.5, 1.0));
  const double z = oracle::weighted_integral(
      [](double x) { return std::pow(std::abs(x), 1.5) * std::log(std::exp(1.0) + std::abs(x)); },
      [](double) { return 1.0; });
  CHECK(pl.z_norm() == doctest::Approx(z).epsilon(1e-9));
}

TEST_CASE("panel doubling changes Z by at most 1e-9") {
  for (const auto* m : {&gauss(), &laplace(), &m15()}) {
    CHECK(m->z_doubling_change() <= 1e-9);
    QuadratureSpec finer = m->quad();
    finer.intervals *= 2;
    const auto m2 = normalize(m->potential(), finer);
    CHECK(std::abs(m2.z_norm() - m->z_norm()) <= 1e-9 * m->z_norm());
  }
}

TEST_CASE("density integrates to one and is symmetric") {
  for (const auto* m : {&gauss(), &laplace(), &m15()}) {
    CHECK(m->expect([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(m->cdf(0.0) - 0.5) <= 1e-9);
    double prev = 0.0;
    for (const double x : linspace(-m->trunc(), m->trunc(), 2001)) {
      const double c = m->cdf(x);
      CHECK(c >= prev);
      if (c > 1e-8 && c < 1.0 - 1e-8) CHECK(c > prev);
      prev = c;
    }
    CHECK(m->truncated_mass_estimate() < 1e-15);
  }
}

TEST_CASE("tails") {
  CHECK(laplace().tail(1.0) == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-9));
  CHECK(gauss().tail(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  for (const double x : {0.3, 1.0, 2.5, 4.0}) {
    CHECK(gauss().tail(x) == doctest::Approx(oracle::gauss_tail(x)).epsilon(1e-8));
    CHECK(gauss().tail(-x) == doctest::Approx(1.0 - oracle::gauss_tail(x)).epsilon(1e-9));
  }
  const double ratio = gauss().tail(5.0) / gauss().tail_asymptotic(5.0);
  CHECK(ratio >= 0.97);
  CHECK(ratio <= 1.0);
  CHECK_THROWS_AS(gauss().tail_asymptotic(0.0), PreconditionError);
}

TEST_CASE("tail ratio approaches one with the expected trend") {
  // tail / tail_asymptotic = 1 - Phi'' / Phi'^2 + ..., and Phi'' / Phi'^2 = (alpha - 1) / (alpha Phi)
  // for the power family; the truncation at Phi(0) + 40 is invisible up to Phi = 30
  for (const double alpha : {1.5, 2.0}) {
    const auto m = normalize(make_builtin(Family::power, alpha));
    const auto& p = m.potential();
    double prev = 0.0;
    for (const double x : linspace(1.0, p.truncation_point(30.0), 40)) {
      const double r = m.tail(x) / m.tail_asymptotic(x);
      CHECK(r > prev);
      CHECK(r < 1.0 + 1e-9);
      prev = r;
    }
    const double x25 = p.truncation_point(25.0);
    const double lead = (alpha - 1.0) / (alpha * p(x25));
    const double err = 1.0 - m.tail(x25) / m.tail_asymptotic(x25);
    CHECK(err >= 0.5 * lead);
    CHECK(err <= 1.5 * lead);
  }
}

TEST_CASE("inverse cdf") {
  CHECK(std::abs(gauss().inverse_cdf(0.5)) <= 1e-12);
  CHECK(std::abs(m15().inverse_cdf(0.5)) <= 1e-12);
  CHECK(laplace().inverse_cdf(0.75) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  for (const double u : {1e-9, 1e-6, 0.01, 0.3, 0.77, 0.999, 1.0 - 1e-9}) {
    CHECK(laplace().inverse_cdf(u) == doctest::Approx(oracle::laplace_quantile(u)).epsilon(1e-8));
    for (const auto* m : {&gauss(), &m15()}) {
      CHECK(std::abs(m->cdf(m->inverse_cdf(u)) - u) <= 1e-8);
    }
  }
  CHECK_THROWS_AS(gauss().inverse_cdf(0.0), PreconditionError);
  CHECK_THROWS_AS(gauss().inverse_cdf(1.0), PreconditionError);
}

TEST_CASE("sampling is deterministic and matches the cdf") {
  const auto a = m15().sample(3, 7);
  const auto b = m15().sample(3, 7);
  CHECK(a == b);
  CHECK(m15().sample(3, 8) != a);
  const auto big = m15().sample(100000, 11);
  CHECK(ks_distance(m15(), big) <= 1.63 / std::sqrt(1e5));
  CHECK(m15().sample(0, 1).empty());
}

TEST_CASE("expectations") {
  CHECK(std::abs(m15().expect([](double x) { return x; })) <= 1e-9);
  CHECK(gauss().expect([](double x) { return x * x; }) == doctest::Approx(0.5).epsilon(1e-9));
  const double m2 = oracle::expect([](double x) { return std::pow(std::abs(x), 1.5); },
                                   [](double x) { return x * x; });
  CHECK(m15().expect([](double x) { return x * x; }) == doctest::Approx(m2).epsilon(1e-8));
  // a kink placed at a breakpoint is integrated exactly
  const std::vector<double> kink = {0.7};
  const double hinge = gauss().expect([](double x) { return std::max(x - 0.7, 0.0); }, kink);
  const double want = std::exp(-0.49) / (2.0 * std::sqrt(oracle::kPi)) - 0.7 * oracle::gauss_tail(0.7);
  CHECK(hinge == doctest::Approx(want).epsilon(1e-9));
  CHECK_THROWS_AS(gauss().expect([](double x) { return x > 1.0 ? std::nan("") : 0.0; }), NumericalError);
}

TEST_CASE("non-integrable potentials are rejected") {
  CHECK_THROWS_AS(normalize(make_custom([](double) { return 0.0; }, [](double) { return 0.0; })),
                  PreconditionError);
}
