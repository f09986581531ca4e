#include "logsob/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace logsob {

namespace {

// Unnormalized masses of exp(-Phi) over the knot intervals of [0, X].
std::vector<double> half_line_masses(const Potential& p, double x_max,
                                     std::size_t intervals,
                                     std::size_t subdivisions, int levels) {
  const double h = x_max / static_cast<double>(intervals);
  std::vector<double> masses(intervals);
  std::vector<QuadNode> nodes;
  for (std::size_t i = 0; i < intervals; ++i) {
    nodes.clear();
    const double a = h * static_cast<double>(i);
    const double b = (i + 1 == intervals) ? x_max : h * static_cast<double>(i + 1);
    if (i == 0) {
      append_graded_toward_left(nodes, a, b, levels);
    } else {
      const double step = (b - a) / static_cast<double>(subdivisions);
      for (std::size_t s = 0; s < subdivisions; ++s) {
        append_panel(nodes, a + step * static_cast<double>(s),
                     s + 1 == subdivisions ? b : a + step * static_cast<double>(s + 1));
      }
    }
    double sum = 0.0;
    for (const auto& n : nodes) sum += n.w * std::exp(-p(n.x));
    masses[i] = sum;
  }
  return masses;
}

}  // namespace

LogConcaveMeasure normalize(const Potential& p, const QuadratureSpec& spec) {
  if (spec.intervals < 4 || spec.subdivisions < 1) {
    throw PreconditionError("quadrature spec needs >= 4 intervals");
  }
  LogConcaveMeasure m;
  m.p_ = std::make_shared<const Potential>(p);
  m.spec_ = spec;
  m.trunc_ = p.truncation_point(spec.truncation_offset);
  if (!(m.trunc_ > 0.0)) {
    throw PreconditionError("truncation point is zero: degenerate potential");
  }

  std::size_t subdiv = spec.subdivisions;
  auto coarse = half_line_masses(p, m.trunc_, spec.intervals, subdiv,
                                 spec.grading_levels);
  double z_coarse = 0.0;
  for (const double v : coarse) z_coarse += v;
  std::vector<double> fine;
  double z_fine = 0.0;
  for (;;) {
    fine = half_line_masses(p, m.trunc_, spec.intervals, 2 * subdiv,
                            spec.grading_levels);
    z_fine = 0.0;
    for (const double v : fine) z_fine += v;
    const double change = std::abs(z_fine - z_coarse) / z_fine;
    m.z_change_ = change;
    if (change <= spec.target_rel_error || subdiv >= 64) break;
    subdiv *= 2;
    coarse = std::move(fine);
    z_coarse = z_fine;
  }
  if (!(z_fine > 0.0) || !std::isfinite(z_fine)) {
    throw PreconditionError("exp(-Phi) is not integrable");
  }
  m.spec_.subdivisions = 2 * subdiv;
  m.z_ = 2.0 * z_fine;

  const std::size_t n = spec.intervals;
  m.knots_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    m.knots_[i] = m.trunc_ * static_cast<double>(i) / static_cast<double>(n);
  }
  m.knots_.back() = m.trunc_;
  m.knot_tail_.assign(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    m.knot_tail_[i] = m.knot_tail_[i + 1] + fine[i] / m.z_;
  }
  m.knot_density_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) m.knot_density_[i] = m.density(m.knots_[i]);

  const double d_end = p.derivative(m.trunc_);
  m.dropped_ = d_end > 0.0 ? std::exp(-p(m.trunc_)) / (m.z_ * d_end) : kInf;
  m.nodes_ = m.build_nodes({}, n);
  return m;
}

double LogConcaveMeasure::density(double x) const {
  return std::exp(-p_->value(x)) / z_;
}

double LogConcaveMeasure::interval_mass(std::size_t i, double a,
                                        double b) const {
  double sum = 0.0;
  if (i == 0) {
    std::vector<QuadNode> nodes;
    append_graded_toward_left(nodes, a, b, spec_.grading_levels);
    for (const auto& n : nodes) sum += n.w * std::exp(-p_->value(n.x));
    return sum / z_;
  }
  const auto rule = gauss_legendre_rule();
  const double step = (b - a) / static_cast<double>(spec_.subdivisions);
  for (std::size_t s = 0; s < spec_.subdivisions; ++s) {
    const double lo = a + step * static_cast<double>(s);
    const double hi = s + 1 == spec_.subdivisions ? b : lo + step;
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    for (const auto& q : rule) sum += r * q.w * std::exp(-p_->value(c + r * q.x));
  }
  return sum / z_;
}

double LogConcaveMeasure::tail(double x) const {
  if (x < 0.0) return 1.0 - tail(-x);
  if (x >= trunc_) return 0.0;
  const std::size_t n = knots_.size() - 1;
  const double h = trunc_ / static_cast<double>(n);
  auto i = static_cast<std::size_t>(x / h);
  if (i >= n) i = n - 1;
  while (i > 0 && knots_[i] > x) --i;
  while (i + 1 < n && knots_[i + 1] <= x) ++i;
  if (x == knots_[i]) return knot_tail_[i];
  return knot_tail_[i + 1] + interval_mass(i, x, knots_[i + 1]);
}

double LogConcaveMeasure::cdf(double x) const {
  if (x < 0.0) return tail(-x);
  return 1.0 - tail(x);
}

double LogConcaveMeasure::tail_asymptotic(double x) const {
  const double d = p_->derivative(x);
  if (!(d > 0.0)) {
    throw PreconditionError("tail asymptotic undefined where Phi'(x) <= 0");
  }
  return std::exp(-p_->value(x)) / (z_ * d);
}

double LogConcaveMeasure::inverse_cdf(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw PreconditionError("inverse_cdf needs u in (0, 1)");
  }
  const bool lower = u < 0.5;
  const double target = lower ? u : 1.0 - u;
  if (target >= knot_tail_.front()) return 0.0;
  const std::size_t n = knots_.size() - 1;
  // knot_tail_ is decreasing: find i with tail_i >= target > tail_{i+1}
  const auto it = std::upper_bound(knot_tail_.begin(), knot_tail_.end(), target,
                                   [](double t, double v) { return t > v; });
  std::size_t i = static_cast<std::size_t>(it - knot_tail_.begin());
  i = std::min(std::max<std::size_t>(i, 1), n) - 1;
  double lo = knots_[i], hi = knots_[i + 1];
  const double t0 = knot_tail_[i], t1 = knot_tail_[i + 1];
  if (target <= t1) return lower ? -hi : hi;

  // cubic Hermite in the tail variable, slopes dx/dT = -1/density
  double y = 0.0;
  {
    const double dt = t0 - t1;
    const double s = (t0 - target) / dt;
    const double m0 = dt / knot_density_[i];
    const double m1 = dt / knot_density_[i + 1];
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    y = h00 * lo + h10 * m0 + h01 * hi + h11 * m1;
    if (!(y > lo && y < hi)) y = lo + s * (hi - lo);
  }
  for (int iter = 0; iter < 60; ++iter) {
    const double t = tail(y);
    const double r = t - target;
    if (std::abs(r) <= 1e-14 * target) break;
    if (r > 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    const double dens = density(y);
    double next = y + r / dens;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == y) break;
    y = next;
  }
  return lower ? -y : y;
}

std::vector<double> LogConcaveMeasure::sample(std::size_t n,
                                              std::uint64_t seed) const {
  std::mt19937_64 eng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = inverse_cdf(uniform_open01(eng));
  return out;
}

std::vector<QuadNode> LogConcaveMeasure::build_nodes(
    std::span<const double> breaks, std::size_t intervals) const {
  std::vector<double> bounds;
  bounds.reserve(2 * intervals + 1 + breaks.size());
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double k = trunc_ * static_cast<double>(i) / static_cast<double>(intervals);
    bounds.push_back(i == intervals ? trunc_ : k);
    if (i > 0) bounds.push_back(i == intervals ? -trunc_ : -k);
  }
  for (const double b : breaks) {
    if (b > -trunc_ && b < trunc_ && std::isfinite(b)) bounds.push_back(b);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  const std::size_t sub = spec_.subdivisions;
  std::vector<QuadNode> raw;
  std::vector<QuadNode> tmp;
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    const double a = bounds[j], b = bounds[j + 1];
    if (a == 0.0) {
      append_graded_toward_left(raw, a, b, spec_.grading_levels);
    } else if (b == 0.0) {
      tmp.clear();
      append_graded_toward_left(tmp, 0.0, -a, spec_.grading_levels);
      for (auto it = tmp.rbegin(); it != tmp.rend(); ++it) raw.push_back({-it->x, it->w});
    } else {
      const double step = (b - a) / static_cast<double>(sub);
      for (std::size_t s = 0; s < sub; ++s) {
        append_panel(raw, a + step * static_cast<double>(s),
                     s + 1 == sub ? b : a + step * static_cast<double>(s + 1));
      }
    }
  }
  for (auto& node : raw) node.w *= density(node.x);
  return raw;
}

std::vector<QuadNode> LogConcaveMeasure::nodes_with_breaks(
    std::span<const double> breakpoints) const {
  return build_nodes(breakpoints, knots_.size() - 1);
}

std::vector<QuadNode> LogConcaveMeasure::coarse_nodes(std::size_t intervals) const {
  if (intervals < 2) throw PreconditionError("coarse_nodes needs >= 2 intervals");
  return build_nodes({}, intervals);
}

namespace {

double sum_nodes(std::span<const QuadNode> nodes, const ScalarMap& g) {
  double total = 0.0;
  for (const auto& n : nodes) {
    const double v = g(n.x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "integrand is not finite at x = " << n.x;
      throw NumericalError(msg.str());
    }
    total += n.w * v;
  }
  return total;
}

}  // namespace

double LogConcaveMeasure::expect(const ScalarMap& g) const {
  return sum_nodes(nodes_, g);
}

double LogConcaveMeasure::expect(const ScalarMap& g,
                                 std::span<const double> breakpoints) const {
  if (breakpoints.empty()) return expect(g);
  const auto nodes = nodes_with_breaks(breakpoints);
  return sum_nodes(nodes, g);
}

double ks_distance(const LogConcaveMeasure& m, std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = m.cdf(samples[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - f,
                             f - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace logsob
