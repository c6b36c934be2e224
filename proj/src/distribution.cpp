#include "datamarket/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace datamarket {

namespace {

void check_x(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("position must lie in [0,1]");
}

}  // namespace

ConsumerDistribution ConsumerDistribution::uniform() {
  ConsumerDistribution d;
  d.kind_ = Kind::uniform;
  return d;
}

ConsumerDistribution ConsumerDistribution::linear(double slope) {
  if (!(std::abs(slope) < 2.0))
    throw std::invalid_argument("linear density needs |slope| < 2 for positivity");
  ConsumerDistribution d;
  d.kind_ = Kind::linear;
  d.slope_ = slope;
  return d;
}

ConsumerDistribution ConsumerDistribution::tabulated(
    std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("tabulated density needs >= 2 points");
  std::sort(points.begin(), points.end());
  if (points.front().first != 0.0 || points.back().first != 1.0)
    throw std::invalid_argument("tabulated density must span [0,1]");
  ConsumerDistribution d;
  d.kind_ = Kind::tabulated;
  for (const auto& [x, f] : points) {
    if (!(f > 0.0)) throw std::invalid_argument("tabulated density must be strictly positive");
    if (!d.xs_.empty() && x <= d.xs_.back())
      throw std::invalid_argument("tabulated density has duplicate positions");
    d.xs_.push_back(x);
    d.fs_.push_back(f);
  }
  // Exact trapezoid integral of the interpolant, then renormalize.
  d.cum_.assign(d.xs_.size(), 0.0);
  for (std::size_t i = 1; i < d.xs_.size(); ++i)
    d.cum_[i] = d.cum_[i - 1] +
                0.5 * (d.fs_[i] + d.fs_[i - 1]) * (d.xs_[i] - d.xs_[i - 1]);
  const double total = d.cum_.back();
  for (auto& f : d.fs_) f /= total;
  for (auto& c : d.cum_) c /= total;
  return d;
}

ConsumerDistribution ConsumerDistribution::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open density CSV: " + path);
  std::vector<std::pair<double, double>> points;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, f;
    if (ss >> x >> f) points.push_back({x, f});
    // non-numeric rows (e.g. a header) are skipped
  }
  return tabulated(std::move(points));
}

double ConsumerDistribution::density(double x) const {
  check_x(x);
  switch (kind_) {
    case Kind::uniform:
      return 1.0;
    case Kind::linear:
      return (1.0 - 0.5 * slope_) + slope_ * x;
    case Kind::tabulated: {
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const std::size_t i =
          std::min<std::size_t>(xs_.size() - 1, static_cast<std::size_t>(it - xs_.begin()));
      if (i == 0) return fs_[0];
      const std::size_t lo = i - 1;
      return fs_[lo] + (fs_[i] - fs_[lo]) * (x - xs_[lo]) / (xs_[i] - xs_[lo]);
    }
  }
  return 1.0;
}

double ConsumerDistribution::cdf(double x) const {
  check_x(x);
  switch (kind_) {
    case Kind::uniform:
      return x;
    case Kind::linear:
      return (1.0 - 0.5 * slope_) * x + 0.5 * slope_ * x * x;
    case Kind::tabulated: {
      if (x <= 0.0) return 0.0;
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const std::size_t i =
          std::min<std::size_t>(xs_.size() - 1, static_cast<std::size_t>(it - xs_.begin()));
      if (i == 0) return 0.0;
      const std::size_t lo = i - 1;
      const double dx = x - xs_[lo];
      const double f0 = fs_[lo];
      const double f1 = fs_[lo] + (fs_[i] - fs_[lo]) * dx / (xs_[i] - xs_[lo]);
      return cum_[lo] + 0.5 * (f0 + f1) * dx;
    }
  }
  return x;
}

double ConsumerDistribution::mass(const IntervalSet& set) const {
  double m = 0.0;
  for (const auto& [lo, hi] : set.intervals()) m += cdf(hi) - cdf(lo);
  return m;
}

double ConsumerDistribution::integrate(const std::function<double(double)>& g,
                                       const IntervalSet& set,
                                       std::span<const double> breakpoints,
                                       double tol) const {
  const auto h = [&](double x) { return g(x) * density(x); };

  // Simpson over [a,b] with n panels (n even).
  const auto simpson = [&](double a, double b, std::size_t n) {
    const double step = (b - a) / static_cast<double>(n);
    double sum = h(a) + h(b);
    for (std::size_t i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * h(a + step * i);
    return sum * step / 3.0;
  };

  double total = 0.0;
  for (const auto& [ilo, ihi] : set.intervals()) {
    // Split the interval at declared breakpoints so panels never straddle a kink.
    std::vector<double> cuts{ilo, ihi};
    for (double b : breakpoints)
      if (b > ilo + kMergeTol && b < ihi - kMergeTol) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      if (b - a <= kMergeTol) continue;
      std::size_t n = 64;
      double prev = simpson(a, b, n);
      double delta = std::numeric_limits<double>::infinity();
      while (n < (1u << 14) && delta > tol) {
        n *= 2;
        const double cur = simpson(a, b, n);
        delta = std::abs(cur - prev);
        prev = cur;
      }
      if (delta > tol) throw QuadratureError("quadrature did not converge", total + prev);
      total += prev;
    }
  }
  return total;
}

}  // namespace datamarket
