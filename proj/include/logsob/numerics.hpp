#pragma once

// Shared one-dimensional numerical machinery: Gauss-Legendre panels,
// monotone root bracketing, golden-section search, grids, and the
// deterministic parallel loop used by the scanning operations.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace logsob {

/// A caller violated an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a certified answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ScalarMap = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadNode {
  double x;
  double w;
};

/// Order of the fixed Gauss-Legendre rule used on every panel.
inline constexpr int kGaussOrder = 20;

/// Nodes and weights of the fixed rule on [-1, 1], ascending in x.
std::span<const QuadNode> gauss_legendre_rule();

/// Appends the rule mapped onto [a, b] to `out`.
void append_panel(std::vector<QuadNode>& out, double a, double b);

/// Appends panels on [a, b] that shrink geometrically toward `a`
/// (levels halvings), resolving algebraic singularities at `a`.
void append_graded_toward_left(std::vector<QuadNode>& out, double a, double b,
                               int levels);

/// Composite rule with `panels` equal panels.
double integrate(const ScalarMap& f, double a, double b, int panels = 1);

/// Composite rule with geometric grading toward `a`.
double integrate_graded(const ScalarMap& f, double a, double b,
                        int panels = 1, int levels = 40);

/// Smallest x in [lo, hi] with f(x) >= target for nondecreasing f, by
/// bisection. Requires f(hi) >= target. Stops when the bracket width is
/// below rel_tol * hi or when it can no longer shrink.
double bisect_leftmost(const ScalarMap& f, double target, double lo, double hi,
                       double rel_tol);

/// Expands hi = start, 2 start, 4 start, ... until f(hi) >= target.
/// Throws NumericalError once hi exceeds `limit`.
double expand_bracket(const ScalarMap& f, double target, double start,
                      double limit);

struct MinimumResult {
  double x;
  double value;
};

/// Golden-section search for a unimodal f on [a, b].
MinimumResult golden_section_min(const ScalarMap& f, double a, double b,
                                 double rel_tol = 1e-12);

/// n points log-spaced on [a, b] (a > 0), endpoints included.
std::vector<double> log_grid(double a, double b, std::size_t n);

/// Log-spaced grid with at least `per_decade` points per decade.
std::vector<double> log_grid_per_decade(double a, double b,
                                        std::size_t per_decade,
                                        std::size_t min_points = 2);

/// n points evenly spaced on [a, b], endpoints included.
std::vector<double> linspace(double a, double b, std::size_t n);

/// Number of worker threads: LOGSOB_THREADS if set and positive, else the
/// hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Bodies write
/// into caller-owned slots indexed by i, so results do not depend on the
/// schedule.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

/// SplitMix64 finalizer; used to derive independent per-stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` of a run seeded with `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform double in the open interval (0, 1) from 53 random bits.
template <class Engine>
double uniform_open01(Engine& eng) {
  for (;;) {
    const std::uint64_t bits = static_cast<std::uint64_t>(eng()) >> 11;
    if (bits != 0) return static_cast<double>(bits) * 0x1.0p-53;
  }
}

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace logsob
