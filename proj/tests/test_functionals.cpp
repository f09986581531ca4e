#include <doctest.h>

#include <cmath>
#include <random>

#include "logsob/functionals.hpp"
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
const HFunction& h15() {
  static const HFunction h = build_H(LegendreEngine(make_builtin(Family::power, 1.5)), 1.0);
  return h;
}

double phi15(double x) { return std::pow(std::abs(x), 1.5); }

}  // namespace

TEST_CASE("test functions") {
  const auto t = TestFunction::exp_tilt(1.0);
  CHECK(t(2.0) == doctest::Approx(std::exp(1.0)));
  CHECK(t.derivative(2.0) == doctest::Approx(0.5 * std::exp(1.0)));
  const auto pl = TestFunction::piecewise_linear({0.0, 1.0, 2.0}, {1.0, 3.0, 2.0});
  CHECK(pl(0.5) == doctest::Approx(2.0));
  CHECK(pl(-5.0) == 1.0);
  CHECK(pl(9.0) == 2.0);
  CHECK(pl.derivative(1.0) == doctest::Approx(2.0));  // left limit at the kink
  CHECK(pl.kinks().size() == 3);
  const auto h = TestFunction::hinge(0.5);
  CHECK(h(0.2) == 0.0);
  CHECK(h(1.5) == 1.0);
  const auto b = TestFunction::bump(0.0, 1.0);
  CHECK(b(0.0) > b(0.5));
  CHECK(b(5.0) >= 0.0);
  for (const Shape s : all_shapes()) {
    CHECK(shape_from_string(to_string(s)) == s);
    const double x = 0.37, d = 1e-6;
    CHECK(shape_derivative(s, x) ==
          doctest::Approx((shape_value(s, x + d) - shape_value(s, x - d)) / (2 * d)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(shape_from_string("zigzag"), PreconditionError);
  CHECK_THROWS_AS(TestFunction::piecewise_linear({0.0, 0.0}, {1.0, 2.0}), PreconditionError);
}

TEST_CASE("entropy closed forms and invariances") {
  const auto c = TestFunction::exp_tilt(0.0);
  CHECK(std::abs(entropy(m15(), c)) <= 1e-12);
  for (const double t : {0.5, 1.0, 2.0}) {
    CHECK(entropy(gauss(), TestFunction::exp_tilt(t)) ==
          doctest::Approx(oracle::gauss_tilt_entropy(t)).epsilon(1e-9));
  }
  CHECK(entropy(gauss(), TestFunction::exp_tilt(1.0)) == doctest::Approx(0.32101).epsilon(1e-4));
  // Ent(c^2 f^2) = c^2 Ent(f^2)
  const auto f = TestFunction::bump(0.3, 0.8);
  const ScalarMap fs = [&f](double x) { return 3.0 * f(x); };
  CHECK(entropy(m15(), fs) == doctest::Approx(9.0 * entropy(m15(), f)).epsilon(1e-9));
  for (const auto& member : default_family(1).members) CHECK(entropy(m15(), member) >= -1e-12);
  const auto oracle_ent = oracle::entropy(phi15, [](double x) { return 1.0 + 0.5 * std::tanh(x); });
  CHECK(entropy(m15(), TestFunction::perturbation(Shape::tanh, 0.5)) ==
        doctest::Approx(oracle_ent).epsilon(1e-8));
  CHECK_THROWS_AS(entropy(m15(), [](double) { return 0.0; }), PreconditionError);
}

TEST_CASE("variance closed forms") {
  const ScalarMap id = [](double x) { return x; };
  CHECK(variance(gauss(), id) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(variance(laplace(), id) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(variance(m15(), TestFunction::exp_tilt(0.0))) <= 1e-14);
}

TEST_CASE("Dirichlet forms") {
  const auto t = TestFunction::exp_tilt(1.0);
  const double ent = entropy(gauss(), t);
  CHECK(dirichlet_classic(gauss(), t) == doctest::Approx(ent).epsilon(1e-9));
  CHECK(dirichlet_H(gauss(), HFunction::quadratic(), t) == doctest::Approx(ent).epsilon(1e-9));
  const auto c = TestFunction::exp_tilt(0.0);
  CHECK(dirichlet_classic(m15(), c) == 0.0);
  CHECK(dirichlet_H(m15(), h15(), c) == 0.0);
  CHECK(dirichlet_H_restricted(m15(), h15(), c, 0.5) == 0.0);
  // kappa above max f^2 leaves nothing
  const auto b = TestFunction::bump(0.0, 1.0, 1.0);
  CHECK(dirichlet_H_restricted(m15(), h15(), b, 10.0) == 0.0);
  double prev = kInf;
  for (const double kappa : linspace(0.0, 1.2, 13)) {
    const double v = dirichlet_H_restricted(m15(), h15(), b, kappa);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  CHECK(dirichlet_H_restricted(m15(), h15(), b, -1.0) ==
        doctest::Approx(dirichlet_H(m15(), h15(), b)).epsilon(1e-12));
}

TEST_CASE("H Dirichlet form against an independent quadrature") {
  const auto t = TestFunction::exp_tilt(1.0);  // f'/f = 1/2, inside the quadratic core
  const double want = 0.25 * oracle::expect(phi15, [](double x) { return std::exp(x); });
  CHECK(dirichlet_H(m15(), h15(), t) == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("0 times infinity convention") {
  // hinge: f = 0 with f' = 0 on the left, fine
  CHECK(std::isfinite(dirichlet_H(m15(), h15(), TestFunction::hinge(0.5))));
  // an isolated zero with nonzero slope has measure zero
  const auto v = TestFunction::piecewise_linear({-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0});
  CHECK(std::isfinite(dirichlet_H(m15(), h15(), v)));
}

TEST_CASE("entropy duality") {
  const auto f = TestFunction::bump(0.2, 0.7);
  CHECK(dual_entropy_gap(m15(), f, [](double) { return 0.0; }) ==
        doctest::Approx(entropy(m15(), f) / second_moment(m15(), f)).epsilon(1e-9));
  // g = log f^2 of the normalized f saturates the inequality
  const double mass = second_moment(m15(), f);
  const ScalarMap g = [&](double x) { return std::log(f(x) * f(x) / mass); };
  CHECK(std::abs(dual_entropy_gap(m15(), f, g)) <= 1e-8);
  std::mt19937_64 eng(5);
  for (int k = 0; k < 20; ++k) {
    const double c = 4.0 * uniform_open01(eng) - 2.0;
    const double w = 0.2 + uniform_open01(eng);
    const double a = 6.0 * uniform_open01(eng) - 3.0;
    const auto fk = TestFunction::bump(2.0 * uniform_open01(eng) - 1.0, 0.5 + uniform_open01(eng));
    const ScalarMap gk = [=](double x) { return a * std::exp(-(x - c) * (x - c) / (w * w)); };
    CHECK(dual_entropy_gap(m15(), fk, gk) >= -1e-8);
  }
  CHECK_THROWS_AS(dual_entropy_gap(m15(), f, [](double x) { return x * x * x * x; }), PreconditionError);
}

TEST_CASE("Gaussian saturation for every tilt") {
  for (const auto& t : tilt_family().members) {
    CHECK(entropy(gauss(), t) / dirichlet_classic(gauss(), t) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("Poincare linearization: entropy(1 + eps g) / eps^2 is 2 Var(g)") {
  const double eps = 1e-3;
  for (const Shape s : {Shape::tanh, Shape::sin, Shape::gaussian, Shape::arctan}) {
    const auto f = TestFunction::perturbation(s, eps);
    const double var = variance(m15(), [s](double x) { return shape_value(s, x); });
    CHECK(entropy(m15(), f) / (eps * eps) == doctest::Approx(2.0 * var).epsilon(0.01));
  }
}

TEST_CASE("best constant scans") {
  const auto quad_h = HFunction::quadratic();
  const auto r = estimate_best_constant(gauss(), quad_h, tilt_family());
  CHECK(r.best_ratio == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.at_index.has_value());
  CHECK(r.counterexamples.empty());

  TestFamily consts{"constants", {TestFunction::exp_tilt(0.0), TestFunction::perturbation(Shape::sin, 0.0)}};
  const auto rc = estimate_best_constant(m15(), h15(), consts);
  CHECK_FALSE(rc.at_index.has_value());
  for (const auto& m : rc.members) CHECK(m.skipped);

  const auto r0 = estimate_best_constant(m15(), h15(), default_family(0));
  const auto r1 = estimate_best_constant(m15(), h15(), default_family(1));
  CHECK(std::isfinite(r0.best_ratio));
  CHECK(r1.best_ratio >= r0.best_ratio - 1e-12);
  // doubling the family grid moves the sup by less than 2%
  const auto r2 = estimate_best_constant(m15(), h15(), default_family(2));
  CHECK(r2.best_ratio >= r1.best_ratio - 1e-12);
  CHECK(r2.best_ratio <= 1.02 * r1.best_ratio);
  CHECK(r0.b_const == 1.0);
  CHECK(r0.d_const == doctest::Approx(6.75).epsilon(1e-8));

  CHECK_THROWS_AS(estimate_best_constant(m15(), h15(), TestFamily{"empty", {}}), PreconditionError);
}

TEST_CASE("scan is independent of the thread count") {
  ScanOptions one, four;
  four.threads = 4;
  const auto a = estimate_best_constant(m15(), h15(), default_family(0), one);
  const auto b = estimate_best_constant(m15(), h15(), default_family(0), four);
  CHECK(a.best_ratio == b.best_ratio);
  REQUIRE(a.members.size() == b.members.size());
  for (std::size_t i = 0; i < a.members.size(); ++i) CHECK(a.members[i].ratio == b.members[i].ratio);
}

TEST_CASE("restricted form flags counterexamples") {
  ScanOptions opts;
  opts.form = InequalityForm::restricted;
  opts.a_const = 0.0;
  opts.kappa = 1e6;  // nothing left in the restricted Dirichlet form
  const auto r = estimate_best_constant(m15(), h15(), tilt_family(1.0, 0.5), opts);
  CHECK_FALSE(r.counterexamples.empty());
  opts.a_const = 100.0;
  const auto ok = estimate_best_constant(m15(), h15(), tilt_family(1.0, 0.5), opts);
  CHECK(ok.counterexamples.empty());
  CHECK(form_from_string("gross") == InequalityForm::classic);
  CHECK(form_from_string(to_string(InequalityForm::restricted)) == InequalityForm::restricted);
}

TEST_CASE("tensorized entropy") {
  const auto u = TestFunction::exp_tilt(1.0);
  const auto one = TestFunction::exp_tilt(0.0);
  const auto quad_h = HFunction::quadratic();
  const auto r = tensor_entropy_2d(m15(), m15(), h15(), h15(), {TensorTestFunction::Form::product, u, one});
  CHECK(r.entropy == doctest::Approx(entropy(m15(), u)).epsilon(1e-12));
  CHECK(r.dirichlet == doctest::Approx(dirichlet_H(m15(), h15(), u)).epsilon(1e-12));

  // Gaussian, f^2 = e^{t(x + y)}: Ent = 2 (t^2/4) e^{t^2/2}
  const double t = 1.0;
  const auto g = tensor_entropy_2d(gauss(), gauss(), quad_h, quad_h,
                                   {TensorTestFunction::Form::product, TestFunction::exp_tilt(t),
                                    TestFunction::exp_tilt(t)});
  CHECK(g.entropy == doctest::Approx(2.0 * 0.25 * t * t * std::exp(0.5 * t * t)).epsilon(1e-9));
  CHECK(g.dirichlet == doctest::Approx(g.entropy).epsilon(1e-9));

  // sum form against the coarse-rule-free separable case v = 0
  const auto s = tensor_entropy_2d(m15(), m15(), h15(), h15(),
                                   {TensorTestFunction::Form::sum, TestFunction::bump(0.0, 1.0),
                                    TestFunction::perturbation(Shape::tanh, 0.0)});
  const ScalarMap shifted = [](double x) { return TestFunction::bump(0.0, 1.0)(x) + 1.0; };
  CHECK(s.entropy == doctest::Approx(entropy(m15(), shifted)).epsilon(1e-5));
}
