#include "logsob/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace logsob {

namespace {

// u log u - u + 1, pointwise nonnegative; integrating it against mu with
// u = f^2 / int f^2 gives Ent(f^2) / int f^2 without cancellation.
double phi_entropy(double u) {
  if (u <= 0.0) return 1.0;
  const double d = u - 1.0;
  if (std::abs(d) < 1e-2) {
    // sum_{k >= 2} (-d)^k / (k (k - 1))
    double term = d * d;
    double sum = 0.0;
    for (int k = 2; k < 12; ++k) {
      sum += term / (k * (k - 1.0));
      term *= -d;
    }
    return sum;
  }
  return u * std::log(u) - d;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

// H(d / f) f^2 with the 0 * infinity = 0 convention.
double h_energy(const HFunction& hf, double f, double d, double x) {
  if (f == 0.0) {
    if (d == 0.0) return 0.0;
    std::ostringstream msg;
    msg << std::setprecision(17) << "f = 0 with f' != 0 at x = " << x
        << ": H(f'/f) f^2 is infinite";
    throw NumericalError(msg.str());
  }
  return hf(d / f) * f * f;
}

}  // namespace

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::exp_tilt: return "exp-tilt";
    case TestKind::piecewise_linear: return "piecewise-linear";
    case TestKind::bump: return "bump";
    case TestKind::hinge: return "hinge";
    case TestKind::perturbation: return "perturbation";
  }
  return "unknown";
}

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::linear: return "linear";
    case Shape::quadratic: return "quadratic";
    case Shape::tanh: return "tanh";
    case Shape::sin: return "sin";
    case Shape::cos: return "cos";
    case Shape::sin2x: return "sin2x";
    case Shape::gaussian: return "gaussian";
    case Shape::arctan: return "arctan";
    case Shape::rational: return "rational";
    case Shape::logcosh: return "logcosh";
  }
  return "unknown";
}

const std::vector<Shape>& all_shapes() {
  static const std::vector<Shape> shapes = {
      Shape::linear, Shape::quadratic, Shape::tanh,     Shape::sin,
      Shape::cos,    Shape::sin2x,     Shape::gaussian, Shape::arctan,
      Shape::rational, Shape::logcosh};
  return shapes;
}

Shape shape_from_string(const std::string& name) {
  for (const Shape s : all_shapes()) {
    if (to_string(s) == name) return s;
  }
  throw PreconditionError("unknown perturbation shape '" + name + "'");
}

double shape_value(Shape s, double x) {
  switch (s) {
    case Shape::linear: return x;
    case Shape::quadratic: return x * x;
    case Shape::tanh: return std::tanh(x);
    case Shape::sin: return std::sin(x);
    case Shape::cos: return std::cos(x);
    case Shape::sin2x: return std::sin(2.0 * x);
    case Shape::gaussian: return std::exp(-0.5 * x * x);
    case Shape::arctan: return std::atan(x);
    case Shape::rational: return x / (1.0 + x * x);
    case Shape::logcosh: {
      const double ax = std::abs(x);
      return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
    }
  }
  return 0.0;
}

double shape_derivative(Shape s, double x) {
  switch (s) {
    case Shape::linear: return 1.0;
    case Shape::quadratic: return 2.0 * x;
    case Shape::tanh: {
      const double c = std::cosh(x);
      return 1.0 / (c * c);
    }
    case Shape::sin: return std::cos(x);
    case Shape::cos: return -std::sin(x);
    case Shape::sin2x: return 2.0 * std::cos(2.0 * x);
    case Shape::gaussian: return -x * std::exp(-0.5 * x * x);
    case Shape::arctan: return 1.0 / (1.0 + x * x);
    case Shape::rational: {
      const double q = 1.0 + x * x;
      return (1.0 - x * x) / (q * q);
    }
    case Shape::logcosh: return std::tanh(x);
  }
  return 0.0;
}

TestFunction::TestFunction(TestKind kind, std::vector<double> params,
                           std::optional<Shape> shape)
    : kind_(kind), params_(std::move(params)), shape_(shape) {}

TestFunction TestFunction::exp_tilt(double t) {
  if (!std::isfinite(t)) throw PreconditionError("exp_tilt needs finite t");
  return TestFunction(TestKind::exp_tilt, {t});
}

TestFunction TestFunction::piecewise_linear(std::vector<double> xs,
                                            std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw PreconditionError("piecewise_linear needs matching nonempty node lists");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw PreconditionError("piecewise_linear nodes must increase");
    }
  }
  std::vector<double> params;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    params.push_back(xs[i]);
    params.push_back(ys[i]);
  }
  TestFunction f(TestKind::piecewise_linear, std::move(params));
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  return f;
}

TestFunction TestFunction::bump(double center, double width, double amp) {
  if (!(width > 0.0)) throw PreconditionError("bump needs width > 0");
  if (!(amp > -1.0)) throw PreconditionError("bump needs amp > -1 to stay positive");
  return TestFunction(TestKind::bump, {center, width, amp});
}

TestFunction TestFunction::hinge(double c) {
  return TestFunction(TestKind::hinge, {c});
}

TestFunction TestFunction::perturbation(Shape g, double eps) {
  return TestFunction(TestKind::perturbation, {eps}, g);
}

double TestFunction::value(double x) const {
  switch (kind_) {
    case TestKind::exp_tilt: return std::exp(0.5 * params_[0] * x);
    case TestKind::piecewise_linear: {
      if (x <= xs_.front()) return ys_.front();
      if (x >= xs_.back()) return ys_.back();
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
      const double s = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
      return ys_[j - 1] + s * (ys_[j] - ys_[j - 1]);
    }
    case TestKind::bump: {
      const double z = (x - params_[0]) / params_[1];
      return 1.0 + params_[2] * std::exp(-0.5 * z * z);
    }
    case TestKind::hinge: return std::max(x - params_[0], 0.0);
    case TestKind::perturbation: return 1.0 + params_[0] * shape_value(*shape_, x);
  }
  return 0.0;
}

double TestFunction::derivative(double x) const {
  switch (kind_) {
    case TestKind::exp_tilt: return 0.5 * params_[0] * std::exp(0.5 * params_[0] * x);
    case TestKind::piecewise_linear: {
      // left limit at the nodes
      if (x <= xs_.front() || x > xs_.back()) return 0.0;
      const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
      return (ys_[j] - ys_[j - 1]) / (xs_[j] - xs_[j - 1]);
    }
    case TestKind::bump: {
      const double z = (x - params_[0]) / params_[1];
      return -params_[2] * z / params_[1] * std::exp(-0.5 * z * z);
    }
    case TestKind::hinge: return x > params_[0] ? 1.0 : 0.0;
    case TestKind::perturbation: return params_[0] * shape_derivative(*shape_, x);
  }
  return 0.0;
}

std::vector<double> TestFunction::kinks() const {
  if (kind_ == TestKind::piecewise_linear) return xs_;
  if (kind_ == TestKind::hinge) return {params_[0]};
  return {};
}

std::string TestFunction::describe() const {
  switch (kind_) {
    case TestKind::exp_tilt: return "exp-tilt(t=" + fmt(params_[0]) + ")";
    case TestKind::piecewise_linear: {
      std::string s = "piecewise-linear(";
      for (std::size_t i = 0; i < xs_.size(); ++i) {
        if (i) s += ";";
        s += fmt(xs_[i]) + ":" + fmt(ys_[i]);
      }
      return s + ")";
    }
    case TestKind::bump:
      return "bump(c=" + fmt(params_[0]) + ",w=" + fmt(params_[1]) +
             ",amp=" + fmt(params_[2]) + ")";
    case TestKind::hinge: return "hinge(c=" + fmt(params_[0]) + ")";
    case TestKind::perturbation:
      return "perturbation(g=" + to_string(*shape_) + ",eps=" + fmt(params_[0]) + ")";
  }
  return "unknown";
}

double entropy(const LogConcaveMeasure& m, const ScalarMap& f,
               std::span<const double> kinks) {
  const auto nodes = kinks.empty() ? std::vector<QuadNode>(m.nodes().begin(), m.nodes().end())
                                   : m.nodes_with_breaks(kinks);
  std::vector<double> sq(nodes.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = f(nodes[i].x);
    sq[i] = v * v;
    if (!std::isfinite(sq[i])) {
      std::ostringstream msg;
      msg << std::setprecision(17) << "f^2 is not finite at x = " << nodes[i].x;
      throw NumericalError(msg.str());
    }
    mass += nodes[i].w * sq[i];
  }
  if (!(mass > 0.0)) throw PreconditionError("entropy: int f^2 dmu vanishes");
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sum += nodes[i].w * phi_entropy(sq[i] / mass);
  }
  return mass * sum;
}

double entropy(const LogConcaveMeasure& m, const TestFunction& f) {
  const auto k = f.kinks();
  return entropy(m, [&f](double x) { return f(x); }, k);
}

double variance(const LogConcaveMeasure& m, const ScalarMap& f,
                std::span<const double> kinks) {
  const double mean = m.expect(f, kinks);
  return m.expect([&](double x) {
    const double d = f(x) - mean;
    return d * d;
  }, kinks);
}

double variance(const LogConcaveMeasure& m, const TestFunction& f) {
  const auto k = f.kinks();
  return variance(m, [&f](double x) { return f(x); }, k);
}

double second_moment(const LogConcaveMeasure& m, const TestFunction& f) {
  const auto k = f.kinks();
  return m.expect([&f](double x) {
    const double v = f(x);
    return v * v;
  }, k);
}

double dirichlet_classic(const LogConcaveMeasure& m, const TestFunction& f) {
  const auto k = f.kinks();
  return m.expect([&f](double x) {
    const double d = f.derivative(x);
    return d * d;
  }, k);
}

double dirichlet_H(const LogConcaveMeasure& m, const HFunction& hf,
                   const TestFunction& f) {
  return dirichlet_H_restricted(m, hf, f, -kInf);
}

double dirichlet_H_restricted(const LogConcaveMeasure& m, const HFunction& hf,
                              const TestFunction& f, double kappa) {
  const auto k = f.kinks();
  return m.expect([&](double x) {
    const double v = f(x);
    if (v * v < kappa) return 0.0;
    return h_energy(hf, v, f.derivative(x), x);
  }, k);
}

double dual_entropy_gap(const LogConcaveMeasure& m, const TestFunction& f,
                        const ScalarMap& g) {
  const auto k = f.kinks();
  const auto nodes = m.nodes_with_breaks(k);
  const double mass = second_moment(m, f);
  if (!(mass > 0.0)) throw PreconditionError("dual_entropy_gap: int f^2 vanishes");

  std::vector<double> gv(nodes.size());
  double gmax = -kInf;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    gv[i] = g(nodes[i].x);
    if (std::isnan(gv[i]) || gv[i] == kInf) {
      throw NumericalError("e^g is not finite inside the domain");
    }
    gmax = std::max(gmax, gv[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    z += nodes[i].w * std::exp(gv[i] - gmax);
  }
  // mass piling up at the truncation boundary means e^g is not integrable
  const std::size_t edge = std::min<std::size_t>(kGaussOrder, nodes.size() / 2);
  double boundary = 0.0;
  for (std::size_t i = 0; i < edge; ++i) {
    boundary += nodes[i].w * std::exp(gv[i] - gmax);
    const std::size_t j = nodes.size() - 1 - i;
    boundary += nodes[j].w * std::exp(gv[j] - gmax);
  }
  if (!(z > 0.0) || boundary > 1e-6 * z) {
    throw PreconditionError("dual_entropy_gap: e^g is not integrable under mu");
  }
  const double log_z = gmax + std::log(z);

  double fg = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = f(nodes[i].x);
    fg += nodes[i].w * v * v * gv[i];
  }
  const double ent = entropy(m, f) / mass;
  return ent + log_z - fg / mass;
}

std::string to_string(InequalityForm form) {
  switch (form) {
    case InequalityForm::classic: return "classic";
    case InequalityForm::modified: return "modified";
    case InequalityForm::restricted: return "restricted";
  }
  return "modified";
}

InequalityForm form_from_string(const std::string& name) {
  if (name == "classic" || name == "gross") return InequalityForm::classic;
  if (name == "modified") return InequalityForm::modified;
  if (name == "restricted") return InequalityForm::restricted;
  throw PreconditionError("unknown inequality form '" + name + "'");
}

TestFamily tilt_family(double t_max, double step) {
  if (!(step > 0.0) || !(t_max > 0.0)) {
    throw PreconditionError("tilt_family needs t_max > 0 and step > 0");
  }
  TestFamily fam;
  fam.description = "exp-tilt t in [-" + fmt(t_max) + ", " + fmt(t_max) +
                    "] step " + fmt(step);
  const auto n = static_cast<long>(std::floor(t_max / step + 1e-9));
  for (long i = -n; i <= n; ++i) {
    if (i == 0) continue;
    fam.members.push_back(TestFunction::exp_tilt(static_cast<double>(i) * step));
  }
  return fam;
}

TestFamily perturbation_family(const std::vector<Shape>& shapes, double eps) {
  TestFamily fam;
  fam.description = "perturbation eps " + fmt(eps) + " shapes";
  for (const Shape s : shapes) {
    fam.description += " " + to_string(s);
    fam.members.push_back(TestFunction::perturbation(s, eps));
  }
  return fam;
}

TestFamily default_family(int refinement) {
  if (refinement < 0 || refinement > 4) {
    throw PreconditionError("family refinement must be in [0, 4]");
  }
  const std::size_t k = std::size_t{1} << refinement;
  TestFamily fam = tilt_family(3.0, 0.25 / static_cast<double>(k));
  const auto centers = linspace(-2.0, 2.0, 4 * k + 1);
  for (const double c : centers) {
    for (std::size_t j = 0; j <= 2 * k; ++j) {
      const double w = 0.5 * std::pow(2.0, static_cast<double>(j) / static_cast<double>(k));
      fam.members.push_back(TestFunction::bump(c, w));
    }
  }
  for (const double c : centers) fam.members.push_back(TestFunction::hinge(c));
  std::vector<Shape> shapes = {Shape::tanh, Shape::sin, Shape::gaussian, Shape::arctan};
  if (refinement > 0) {
    for (const Shape s : {Shape::cos, Shape::sin2x, Shape::rational,
                          Shape::quadratic, Shape::logcosh}) {
      shapes.push_back(s);
    }
  }
  for (const Shape s : shapes) fam.members.push_back(TestFunction::perturbation(s, 0.5));
  std::ostringstream desc;
  desc << "default family level " << refinement << ": " << fam.members.size()
       << " members (tilts step " << fmt(0.25 / static_cast<double>(k)) << ", "
       << centers.size() << "x" << 2 * k + 1 << " bumps, " << centers.size()
       << " hinges, " << shapes.size() << " perturbations eps 0.5)";
  fam.description = desc.str();
  return fam;
}

BestConstantReport estimate_best_constant(const LogConcaveMeasure& m,
                                          const HFunction& hf,
                                          const TestFamily& family,
                                          const ScanOptions& opts) {
  if (family.members.empty()) throw PreconditionError("test family is empty");
  if (opts.form == InequalityForm::restricted && !(opts.a_const >= 0.0)) {
    throw PreconditionError("restricted form needs A >= 0");
  }
  BestConstantReport rep;
  rep.family = family.description;
  rep.form = opts.form;
  rep.a_const = opts.form == InequalityForm::restricted ? opts.a_const : 0.0;
  rep.kappa = opts.form == InequalityForm::restricted ? opts.kappa : 0.0;
  rep.b_const = hf.b_const();
  rep.d_const = hf.d_const();

  const auto& mem = family.members;
  rep.members.resize(mem.size());
  parallel_for(mem.size(), std::max(1u, opts.threads), [&](std::size_t i) {
    const TestFunction& f = mem[i];
    MemberRatio r;
    r.function = f.describe();
    const double mass = second_moment(m, f);
    double num = entropy(m, f);
    double den = 0.0;
    switch (opts.form) {
      case InequalityForm::classic: den = dirichlet_classic(m, f); break;
      case InequalityForm::modified: den = dirichlet_H(m, hf, f); break;
      case InequalityForm::restricted:
        num -= opts.a_const * variance(m, f);
        den = dirichlet_H_restricted(m, hf, f, opts.kappa);
        break;
    }
    r.numerator = num;
    r.denominator = den;
    const bool num_zero = num <= 1e-12 * mass;
    const bool den_zero = den <= 1e-13 * mass;
    if (den_zero) {
      r.skipped = num_zero;
      r.violated = !num_zero;
      r.ratio = num_zero ? 0.0 : kInf;
    } else {
      r.ratio = std::max(num, 0.0) / den;
    }
    rep.members[i] = r;
  });

  for (std::size_t i = 0; i < mem.size(); ++i) {
    const auto& r = rep.members[i];
    if (r.violated) {
      rep.counterexamples.push_back(r.function);
      continue;
    }
    if (r.skipped) continue;
    if (!rep.at_index || r.ratio > rep.best_ratio) {
      rep.best_ratio = r.ratio;
      rep.at_index = i;
      rep.at_function = r.function;
    }
  }
  return rep;
}

TensorResult tensor_entropy_2d(const LogConcaveMeasure& m1,
                               const LogConcaveMeasure& m2,
                               const HFunction& h1, const HFunction& h2,
                               const TensorTestFunction& f,
                               std::size_t sum_intervals) {
  const TestFunction& u = f.u;
  const TestFunction& v = f.v;
  if (f.form == TensorTestFunction::Form::product) {
    // Ent(u^2 v^2) = Ent(u^2) int v^2 + int u^2 Ent(v^2), and the x-part
    // of the Dirichlet form is H1(u'/u) u^2 v^2.
    const double uu = second_moment(m1, u);
    const double vv = second_moment(m2, v);
    return {entropy(m1, u) * vv + uu * entropy(m2, v),
            dirichlet_H(m1, h1, u) * vv + uu * dirichlet_H(m2, h2, v)};
  }

  const auto n1 = m1.coarse_nodes(sum_intervals);
  const auto n2 = m2.coarse_nodes(sum_intervals);
  std::vector<double> uv(n1.size()), ud(n1.size()), vv(n2.size()), vd(n2.size());
  for (std::size_t i = 0; i < n1.size(); ++i) {
    uv[i] = u(n1[i].x);
    ud[i] = u.derivative(n1[i].x);
  }
  for (std::size_t j = 0; j < n2.size(); ++j) {
    vv[j] = v(n2[j].x);
    vd[j] = v.derivative(n2[j].x);
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < n1.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n2.size(); ++j) {
      const double s = uv[i] + vv[j];
      row += n2[j].w * s * s;
    }
    mass += n1[i].w * row;
  }
  if (!(mass > 0.0)) throw PreconditionError("tensor entropy: int f^2 vanishes");
  double ent = 0.0;
  double dir = 0.0;
  for (std::size_t i = 0; i < n1.size(); ++i) {
    double row_e = 0.0;
    double row_d = 0.0;
    for (std::size_t j = 0; j < n2.size(); ++j) {
      const double s = uv[i] + vv[j];
      row_e += n2[j].w * phi_entropy(s * s / mass);
      row_d += n2[j].w * (h_energy(h1, s, ud[i], n1[i].x) +
                          h_energy(h2, s, vd[j], n2[j].x));
    }
    ent += n1[i].w * row_e;
    dir += n1[i].w * row_d;
  }
  return {mass * ent, dir};
}

}  // namespace logsob
