#include "datamarket/types.hpp"

#include <algorithm>
#include <cmath>

namespace datamarket {

IntervalSet IntervalSet::from_pairs(std::vector<Interval> pairs) {
  for (const auto& [lo, hi] : pairs) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw std::invalid_argument("IntervalSet: non-finite endpoint");
    if (lo < -kMergeTol || hi > 1.0 + kMergeTol || lo > hi + kMergeTol)
      throw std::invalid_argument("IntervalSet: need 0 <= lo <= hi <= 1");
  }
  std::sort(pairs.begin(), pairs.end());
  IntervalSet out;
  for (auto [lo, hi] : pairs) {
    lo = std::clamp(lo, 0.0, 1.0);
    hi = std::clamp(hi, 0.0, 1.0);
    if (hi - lo <= kMergeTol) continue;  // zero-measure pieces cannot affect any integral
    if (!out.ivs_.empty() && lo <= out.ivs_.back().second + kMergeTol) {
      out.ivs_.back().second = std::max(out.ivs_.back().second, hi);
    } else {
      out.ivs_.push_back({lo, hi});
    }
  }
  return out;
}

double IntervalSet::measure() const {
  double m = 0.0;
  for (const auto& [lo, hi] : ivs_) m += hi - lo;
  return m;
}

bool IntervalSet::contains(double x, double tol) const {
  for (const auto& [lo, hi] : ivs_)
    if (x >= lo - tol && x <= hi + tol) return true;
  return false;
}

IntervalSet IntervalSet::complement() const {
  std::vector<Interval> out;
  double cursor = 0.0;
  for (const auto& [lo, hi] : ivs_) {
    if (lo > cursor) out.push_back({cursor, lo});
    cursor = hi;
  }
  if (cursor < 1.0) out.push_back({cursor, 1.0});
  return from_pairs(std::move(out));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const auto& [alo, ahi] : ivs_) {
    for (const auto& [blo, bhi] : other.ivs_) {
      const double lo = std::max(alo, blo);
      const double hi = std::min(ahi, bhi);
      if (hi > lo) out.push_back({lo, hi});
    }
  }
  return from_pairs(std::move(out));
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> out = ivs_;
  out.insert(out.end(), other.ivs_.begin(), other.ivs_.end());
  return from_pairs(std::move(out));
}

IntervalSet IntervalSet::subtract(const IntervalSet& other) const {
  return intersect(other.complement());
}

std::vector<double> IntervalSet::endpoints() const {
  std::vector<double> out;
  out.reserve(2 * ivs_.size());
  for (const auto& [lo, hi] : ivs_) {
    out.push_back(lo);
    out.push_back(hi);
  }
  return out;
}

bool Mechanism::covers(double theta) const {
  for (double w : withheld_points)
    if (std::abs(theta - w) <= kMergeTol) return false;
  for (double s : shared_points)
    if (std::abs(theta - s) <= kMergeTol) return true;
  return shared.contains(theta);
}

}  // namespace datamarket
