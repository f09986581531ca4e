#include "logsob/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

namespace logsob {

namespace {

std::array<QuadNode, kGaussOrder> build_rule() {
  using Rule = boost::math::quadrature::gauss<double, kGaussOrder>;
  const auto& abscissa = Rule::abscissa();  // nonnegative half
  const auto& weights = Rule::weights();
  std::array<QuadNode, kGaussOrder> rule{};
  std::size_t k = 0;
  for (std::size_t i = abscissa.size(); i-- > 0;) {
    rule[k++] = {-abscissa[i], weights[i]};
  }
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    rule[k++] = {abscissa[i], weights[i]};
  }
  return rule;
}

}  // namespace

std::span<const QuadNode> gauss_legendre_rule() {
  static const std::array<QuadNode, kGaussOrder> rule = build_rule();
  return rule;
}

void append_panel(std::vector<QuadNode>& out, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (const auto& node : gauss_legendre_rule()) {
    out.push_back({mid + half * node.x, half * node.w});
  }
}

void append_graded_toward_left(std::vector<QuadNode>& out, double a, double b,
                               int levels) {
  // [a, a + w 2^-levels], ..., [a + w/4, a + w/2], [a + w/2, b]
  const double width = b - a;
  double left = a;
  for (int k = levels; k >= 1; --k) {
    const double right = a + std::ldexp(width, -k);
    append_panel(out, left, right);
    left = right;
  }
  append_panel(out, left, b);
}

double integrate(const ScalarMap& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double hi = (p + 1 == panels) ? b : lo + h;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (lo + hi);
    double sum = 0.0;
    for (const auto& node : gauss_legendre_rule()) {
      sum += node.w * f(mid + half * node.x);
    }
    total += half * sum;
  }
  return total;
}

double integrate_graded(const ScalarMap& f, double a, double b, int panels,
                        int levels) {
  std::vector<QuadNode> nodes;
  const double h = (b - a) / panels;
  append_graded_toward_left(nodes, a, a + h, levels);
  for (int p = 1; p < panels; ++p) {
    append_panel(nodes, a + p * h, (p + 1 == panels) ? b : a + (p + 1) * h);
  }
  double total = 0.0;
  for (const auto& node : nodes) total += node.w * f(node.x);
  return total;
}

double bisect_leftmost(const ScalarMap& f, double target, double lo, double hi,
                       double rel_tol) {
  if (f(lo) >= target) return lo;
  // invariant: f(lo) < target <= f(hi)
  for (int iter = 0; iter < 2000; ++iter) {
    if (hi - lo <= rel_tol * std::abs(hi)) break;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double expand_bracket(const ScalarMap& f, double target, double start,
                      double limit) {
  double hi = start;
  while (f(hi) < target) {
    hi *= 2.0;
    if (hi > limit || !std::isfinite(hi)) {
      throw NumericalError("bracket expansion exceeded limit " +
                           std::to_string(limit));
    }
  }
  return hi;
}

MinimumResult golden_section_min(const ScalarMap& f, double a, double b,
                                 double rel_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 400; ++iter) {
    if (std::abs(b - a) <= rel_tol * (std::abs(c) + std::abs(d)) + 1e-300) break;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? MinimumResult{c, fc} : MinimumResult{d, fd};
}

std::vector<double> log_grid(double a, double b, std::size_t n) {
  if (!(a > 0.0) || !(b >= a) || n < 2) {
    throw PreconditionError("log_grid requires 0 < a <= b and n >= 2");
  }
  std::vector<double> grid(n);
  const double la = std::log(a);
  const double step = (std::log(b) - la) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::exp(la + step * static_cast<double>(i));
  }
  grid.front() = a;
  grid.back() = b;
  return grid;
}

std::vector<double> log_grid_per_decade(double a, double b,
                                        std::size_t per_decade,
                                        std::size_t min_points) {
  const double decades = std::log10(b / a);
  const auto n = static_cast<std::size_t>(
      std::ceil(decades * static_cast<double>(per_decade))) + 1;
  return log_grid(a, b, std::max(n, std::max<std::size_t>(min_points, 2)));
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) throw PreconditionError("linspace requires n >= 2");
  std::vector<double> grid(n);
  const double step = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = a + step * static_cast<double>(i);
  grid.back() = b;
  return grid;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("LOGSOB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace logsob
