#pragma once

// Entropy, variance and Dirichlet forms under a log-concave measure, the
// entropy duality gap, test-function families and best-constant scans.

#include <optional>
#include <string>
#include <vector>

#include "logsob/convex.hpp"
#include "logsob/measure.hpp"

namespace logsob {

enum class TestKind { exp_tilt, piecewise_linear, bump, hinge, perturbation };

/// Shapes g for the perturbation kind f = 1 + eps g.
enum class Shape {
  linear,
  quadratic,
  tanh,
  sin,
  cos,
  sin2x,
  gaussian,
  arctan,
  rational,  // x / (1 + x^2)
  logcosh,
};

std::string to_string(TestKind kind);
std::string to_string(Shape shape);
Shape shape_from_string(const std::string& name);
/// All shapes in declaration order.
const std::vector<Shape>& all_shapes();

double shape_value(Shape s, double x);
double shape_derivative(Shape s, double x);

/// A locally absolutely continuous test function with a derivative
/// defined everywhere (left limits at kinks).
class TestFunction {
 public:
  /// f(x) = exp(t x / 2), so f^2 = exp(t x).
  static TestFunction exp_tilt(double t);
  /// Linear interpolation through (xs, ys), constant beyond the end nodes.
  static TestFunction piecewise_linear(std::vector<double> xs,
                                       std::vector<double> ys);
  /// 1 + amp exp(-(x - c)^2 / (2 w^2)).
  static TestFunction bump(double center, double width, double amp = 1.0);
  /// (x - c)_+.
  static TestFunction hinge(double c);
  /// 1 + eps g(x).
  static TestFunction perturbation(Shape g, double eps);

  double operator()(double x) const { return value(x); }
  double value(double x) const;
  double derivative(double x) const;
  /// Points where the derivative jumps.
  std::vector<double> kinks() const;

  TestKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  std::optional<Shape> shape() const { return shape_; }
  std::string describe() const;

 private:
  TestFunction(TestKind kind, std::vector<double> params,
               std::optional<Shape> shape = std::nullopt);

  TestKind kind_;
  std::vector<double> params_;
  std::vector<double> xs_, ys_;
  std::optional<Shape> shape_;
};

/// Ent(f^2) = int f^2 log f^2 - int f^2 log int f^2, with 0 log 0 = 0.
double entropy(const LogConcaveMeasure& m, const TestFunction& f);
double entropy(const LogConcaveMeasure& m, const ScalarMap& f,
               std::span<const double> kinks = {});
double variance(const LogConcaveMeasure& m, const TestFunction& f);
double variance(const LogConcaveMeasure& m, const ScalarMap& f,
                std::span<const double> kinks = {});
/// int f^2 dmu.
double second_moment(const LogConcaveMeasure& m, const TestFunction& f);

/// int f'^2 dmu.
double dirichlet_classic(const LogConcaveMeasure& m, const TestFunction& f);
/// int H(f'/f) f^2 dmu with 0 * infinity = 0 where f = f' = 0.
double dirichlet_H(const LogConcaveMeasure& m, const HFunction& hf,
                   const TestFunction& f);
/// Same integral restricted to {f^2 >= kappa}.
double dirichlet_H_restricted(const LogConcaveMeasure& m, const HFunction& hf,
                              const TestFunction& f, double kappa);

/// Ent(f^2) + log int e^g - int f^2 g for f rescaled to int f^2 = 1.
/// Nonnegative by the entropy duality.
double dual_entropy_gap(const LogConcaveMeasure& m, const TestFunction& f,
                        const ScalarMap& g);

enum class InequalityForm {
  classic,     // Ent(f^2) <= C int f'^2
  modified,    // Ent(f^2) <= A int H(f'/f) f^2
  restricted,  // Ent(f^2) <= A Var(f) + A' int_{f^2 >= kappa} H(f'/f) f^2
};

std::string to_string(InequalityForm form);
InequalityForm form_from_string(const std::string& name);

struct TestFamily {
  std::string description;
  std::vector<TestFunction> members;
};

/// Tilts t in {+-0.25, ..., +-3}, bumps at 5 centers x 3 widths, 5 hinges
/// and 4 perturbation shapes. Each refinement level doubles the parameter
/// density and keeps every earlier member.
TestFamily default_family(int refinement = 0);
/// Exponential tilts on a uniform grid of step `step` over [-t_max, t_max],
/// excluding t = 0.
TestFamily tilt_family(double t_max = 3.0, double step = 0.25);
/// Perturbations 1 + eps g for the given shapes.
TestFamily perturbation_family(const std::vector<Shape>& shapes, double eps);

struct MemberRatio {
  std::string function;
  double numerator = 0.0;    // Ent(f^2), minus A Var(f) for the restricted form
  double denominator = 0.0;  // Dirichlet form
  double ratio = 0.0;
  bool skipped = false;
  bool violated = false;
};

struct BestConstantReport {
  std::string family;
  InequalityForm form = InequalityForm::modified;
  double a_const = 0.0;  // fixed A of the restricted form
  double b_const = 0.0;
  double d_const = 0.0;
  double kappa = 0.0;
  /// max over the family of numerator / denominator.
  double best_ratio = 0.0;
  std::optional<std::size_t> at_index;
  std::string at_function;
  std::vector<MemberRatio> members;
  /// Members with zero Dirichlet form and positive numerator.
  std::vector<std::string> counterexamples;
};

struct ScanOptions {
  InequalityForm form = InequalityForm::modified;
  double a_const = 1.0;  // restricted form only
  double kappa = 0.0;    // restricted form only
  unsigned threads = 1;
};

/// Best constant of the chosen inequality over a finite family.
BestConstantReport estimate_best_constant(const LogConcaveMeasure& m,
                                          const HFunction& hf,
                                          const TestFamily& family,
                                          const ScanOptions& opts = {});

/// f(x, y) = u(x) v(y) or u(x) + v(y).
struct TensorTestFunction {
  enum class Form { product, sum };
  Form form;
  TestFunction u;
  TestFunction v;
};

struct TensorResult {
  double entropy;
  double dirichlet;  // int [H1(d_x f / f) + H2(d_y f / f)] f^2
};

/// Entropy of f^2 under m1 x m2 and the summed H Dirichlet form. Product
/// functions use the exact separable identities; sums use a tensor rule on
/// `sum_intervals` knot intervals per half-line.
TensorResult tensor_entropy_2d(const LogConcaveMeasure& m1,
                               const LogConcaveMeasure& m2,
                               const HFunction& h1, const HFunction& h2,
                               const TensorTestFunction& f,
                               std::size_t sum_intervals = 48);

}  // namespace logsob
