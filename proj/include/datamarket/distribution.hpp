#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "datamarket/types.hpp"

namespace datamarket {

/// Quadrature failed to reach the requested tolerance; carries the best
/// estimate obtained before giving up.
struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double estimate)
      : std::runtime_error(what), best_estimate(estimate) {}
  double best_estimate;
};

/// Consumer distribution on [0,1] with continuous, strictly positive density.
///
/// Closed-form CDF for the uniform and linear kinds; tabulated densities are
/// linearly interpolated and renormalized at construction, giving an exact
/// piecewise-quadratic CDF.
class ConsumerDistribution {
 public:
  enum class Kind { uniform, linear, tabulated };

  static ConsumerDistribution uniform();
  /// Density f(x) = (1 - slope/2) + slope*x; requires |slope| < 2 for positivity.
  static ConsumerDistribution linear(double slope);
  static ConsumerDistribution tabulated(std::vector<std::pair<double, double>> points);
  /// Two-column CSV (position, density), header row optional.
  static ConsumerDistribution from_csv(const std::string& path);

  Kind kind() const { return kind_; }
  double slope() const { return slope_; }

  double density(double x) const;
  double cdf(double x) const;

  /// Total mass F(hi) - F(lo) summed over the set's intervals.
  double mass(const IntervalSet& set) const;

  /// Integral of g(theta) f(theta) over `set` via adaptive composite Simpson.
  /// Quadrature panels never straddle a declared breakpoint of g.
  double integrate(const std::function<double(double)>& g, const IntervalSet& set,
                   std::span<const double> breakpoints = {}, double tol = 1e-10) const;

 private:
  ConsumerDistribution() = default;

  Kind kind_ = Kind::uniform;
  double slope_ = 0.0;
  // Tabulated kind: density nodes and cumulative integral at each node.
  std::vector<double> xs_, fs_, cum_;
};

}  // namespace datamarket
