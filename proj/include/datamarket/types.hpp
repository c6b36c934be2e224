#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace datamarket {

/// Absolute tolerance used for money/position comparisons unless overridden.
inline constexpr double kDefaultTol = 1e-9;

/// Intervals closer than this are merged at construction.
inline constexpr double kMergeTol = 1e-12;

/// Model primitives: consumer value v and marginal transport cost t.
/// Requires v > 2t so that the market is covered.
struct MarketParams {
  double v;
  double t;

  MarketParams(double value, double transport) : v(value), t(transport) {
    if (!(v > 0.0) || !(t > 0.0))
      throw std::invalid_argument("MarketParams: v and t must be positive");
    if (!(v > 2.0 * t))
      throw std::invalid_argument("MarketParams: market coverage requires v > 2t");
  }
};

/// Finite union of disjoint closed subintervals of [0,1].
/// Normalized at construction: sorted, merged, zero-measure pieces dropped.
class IntervalSet {
 public:
  using Interval = std::pair<double, double>;

  IntervalSet() = default;

  static IntervalSet from_pairs(std::vector<Interval> pairs);
  static IntervalSet interval(double lo, double hi) { return from_pairs({{lo, hi}}); }
  static IntervalSet full() { return interval(0.0, 1.0); }

  const std::vector<Interval>& intervals() const { return ivs_; }
  bool empty() const { return ivs_.empty(); }
  double measure() const;
  bool contains(double x, double tol = 0.0) const;

  IntervalSet complement() const;
  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet subtract(const IntervalSet& other) const;

  /// Subset up to measure `tol` (single points and other null sets are ignored).
  bool subset_of(const IntervalSet& other, double tol = kDefaultTol) const {
    return subtract(other).measure() <= tol;
  }

  std::vector<double> endpoints() const;

  bool operator==(const IntervalSet& other) const = default;

 private:
  std::vector<Interval> ivs_;
};

/// Data-sharing mechanism: firm B reveals locations in `shared` to firm A
/// against a signed transfer r paid by A.
///
/// The point lists carry measure-zero opt-in deviations (a single consumer
/// joining or leaving the shared set). They affect per-consumer prices but no
/// aggregate integral.
struct Mechanism {
  IntervalSet shared;
  double transfer = 0.0;
  std::vector<double> shared_points;
  std::vector<double> withheld_points;

  Mechanism() = default;
  Mechanism(IntervalSet s, double r) : shared(std::move(s)), transfer(r) {}

  /// Whether consumer theta's location is known to firm A under this mechanism.
  bool covers(double theta) const;
};

}  // namespace datamarket
