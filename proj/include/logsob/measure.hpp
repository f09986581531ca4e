#pragma once

// The probability measure mu(dx) = exp(-Phi(x)) dx / Z on the truncated
// line [-X, X], Phi(X) = Phi(0) + 40: normalization, tails, inverse CDF,
// sampling, and the shared quadrature used by every functional.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "logsob/numerics.hpp"
#include "logsob/potential.hpp"

namespace logsob {

struct QuadratureSpec {
  /// Knot intervals on each half-line [0, X].
  std::size_t intervals = 2048;
  /// Initial Gauss panels per knot interval; doubled until Z settles.
  std::size_t subdivisions = 1;
  /// Geometric refinement levels of the interval touching 0.
  int grading_levels = 30;
  /// Relative change of Z under panel doubling that stops refinement.
  double target_rel_error = 1e-10;
  /// Truncation rule offset: Phi(X) >= Phi(0) + offset.
  double truncation_offset = 40.0;
};

class LogConcaveMeasure {
 public:
  const Potential& potential() const { return *p_; }
  std::shared_ptr<const Potential> potential_ptr() const { return p_; }
  double z_norm() const { return z_; }
  double trunc() const { return trunc_; }
  const QuadratureSpec& quad() const { return spec_; }
  /// Relative change of Z in the last panel doubling.
  double z_doubling_change() const { return z_change_; }
  /// exp(-Phi(X)) / (Z Phi'(X)): asymptotic size of the discarded tail.
  double truncated_mass_estimate() const { return dropped_; }

  double density(double x) const;
  /// mu([x, infinity)) restricted to the truncated support.
  double tail(double x) const;
  double cdf(double x) const;
  /// exp(-Phi(x)) / (Z Phi'(x)). Throws PreconditionError where Phi' = 0.
  double tail_asymptotic(double x) const;

  /// Inverse CDF for u in (0, 1): table lookup, cubic Hermite guess and a
  /// safeguarded Newton polish. Values below the truncated tail clamp to
  /// -X or X.
  double inverse_cdf(double u) const;
  /// n draws from a std::mt19937_64 seeded with `seed`.
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  /// Integral of g against mu on the truncated support. Throws
  /// NumericalError naming the abscissa if g is not finite there.
  double expect(const ScalarMap& g) const;
  /// Same, with panel boundaries forced at the given breakpoints.
  double expect(const ScalarMap& g, std::span<const double> breakpoints) const;

  /// Nodes on [-X, X] whose weights already include the density.
  std::span<const QuadNode> nodes() const { return nodes_; }
  /// Node set with panel boundaries at `breakpoints` as well.
  std::vector<QuadNode> nodes_with_breaks(std::span<const double> breakpoints) const;
  /// Coarser node set (`intervals` per half-line) for tensor quadrature.
  std::vector<QuadNode> coarse_nodes(std::size_t intervals) const;

  /// Knots 0 = k_0 < ... < k_n = X and tails mu([k_i, X]).
  std::span<const double> knots() const { return knots_; }
  std::span<const double> knot_tails() const { return knot_tail_; }

 private:
  friend LogConcaveMeasure normalize(const Potential&, const QuadratureSpec&);
  LogConcaveMeasure() = default;

  double interval_mass(std::size_t i, double a, double b) const;
  std::vector<QuadNode> build_nodes(std::span<const double> breaks,
                                    std::size_t intervals) const;

  std::shared_ptr<const Potential> p_;
  QuadratureSpec spec_;
  double z_ = 0.0;
  double trunc_ = 0.0;
  double z_change_ = 0.0;
  double dropped_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> knot_tail_;  // mu([knots_[i], X])
  std::vector<double> knot_density_;
  std::vector<QuadNode> nodes_;
};

/// Normalizes exp(-Phi). Throws PreconditionError when Phi never reaches
/// Phi(0) + offset (not integrable under the truncation rule).
LogConcaveMeasure normalize(const Potential& p, const QuadratureSpec& spec = {});

/// One-sample Kolmogorov-Smirnov distance between samples and the CDF.
double ks_distance(const LogConcaveMeasure& m, std::vector<double> samples);

}  // namespace logsob
