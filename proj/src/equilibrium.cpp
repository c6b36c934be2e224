#include "datamarket/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace datamarket {

namespace {

constexpr int kPriceGridPoints = 4096;
constexpr double kGoldenWidth = 1e-10;
constexpr double kCandidateBand = 1e-6;  // scaled by t when collecting clusters

double golden_section_max(const std::function<double(double)>& f, double lo, double hi) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > kGoldenWidth) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// One parabolic-interpolation step; exact for quadratic objectives so smooth
// optima land at machine precision. Rejected near kinks, where the step would
// move off the corner and lower the objective.
double parabolic_polish(const std::function<double(double)>& f, double x, double lo,
                        double hi) {
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  if (x - h < lo || x + h > hi) return x;
  const double fm = f(x - h), f0 = f(x), fp = f(x + h);
  const double denom = fm - 2.0 * f0 + fp;
  if (!(denom < 0.0)) return x;
  const double vertex = x + 0.5 * h * (fm - fp) / denom;
  if (vertex < lo || vertex > hi) return x;
  const double slack = 1e-13 * std::max(1.0, std::abs(f0));
  return f(vertex) >= f0 - slack ? vertex : x;
}

}  // namespace

double uniform_price_objective(const ConsumerDistribution& dist, const MarketParams& params,
                               const IntervalSet& shared, double price) {
  const double m = mu(price, params);
  if (m <= 0.0) return 0.0;
  double captured = dist.cdf(m);
  for (const auto& [lo, hi] : shared.intervals()) {
    const double a = std::min(lo, m), b = std::min(hi, m);
    if (b > a) captured -= dist.cdf(b) - dist.cdf(a);
  }
  return price * std::max(0.0, captured);
}

std::vector<double> maximize_uniform_price(const ConsumerDistribution& dist,
                                           const MarketParams& params,
                                           const IntervalSet& shared) {
  const auto obj = [&](double p) { return uniform_price_objective(dist, params, shared, p); };
  const double pmax = params.v;
  const double step = pmax / kPriceGridPoints;

  std::vector<double> values(kPriceGridPoints + 1);
  double grid_best = 0.0;
  for (int i = 0; i <= kPriceGridPoints; ++i) {
    values[i] = obj(step * i);
    grid_best = std::max(grid_best, values[i]);
  }
  if (grid_best <= 1e-12) return {};  // objective identically zero

  // Contiguous grid runs near the max become candidate clusters.
  const double band = kCandidateBand * params.t;
  std::vector<std::pair<int, int>> clusters;
  for (int i = 0; i <= kPriceGridPoints; ++i) {
    if (values[i] < grid_best - band) continue;
    if (!clusters.empty() && clusters.back().second == i - 1)
      clusters.back().second = i;
    else
      clusters.push_back({i, i});
  }

  std::vector<std::pair<double, double>> refined;  // (value, price)
  for (const auto& [ilo, ihi] : clusters) {
    const double lo = std::max(0.0, (ilo - 1) * step);
    const double hi = std::min(pmax, (ihi + 1) * step);
    double p = golden_section_max(obj, lo, hi);
    p = parabolic_polish(obj, p, 0.0, pmax);
    refined.push_back({obj(p), p});
    // A flat maximum (P_A an interval): report the run's endpoints as well.
    if (ihi - ilo > 3 && values[ihi] - values[ilo] < 1e-12 &&
        grid_best - values[ilo] < 1e-12) {
      refined.push_back({values[ilo], ilo * step});
      refined.push_back({values[ihi], ihi * step});
    }
  }

  double best = 0.0;
  for (const auto& [val, p] : refined) best = std::max(best, val);
  std::vector<double> out;
  for (const auto& [val, p] : refined)
    if (val >= best - kDefaultTol) out.push_back(p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-7; }),
            out.end());
  return out;
}

double consumer_utility_under(const MarketParams& params, const Mechanism& mech,
                              double uniform_price, double theta) {
  if (mech.covers(theta)) {
    const auto [pa, pb] = best_response_pair_shared(theta, params);
    return theta < 0.5 ? consumer_utility(theta, Firm::A, pa, params)
                       : consumer_utility(theta, Firm::B, pb, params);
  }
  const double pb = best_response_b_unshared(theta, uniform_price, params);
  const double ua = consumer_utility(theta, Firm::A, uniform_price, params);
  const double ub = consumer_utility(theta, Firm::B, pb, params);
  return ub >= ua ? ub : ua;  // ties go to the personalizing firm B
}

namespace {

MarketOutcome build_outcome(const ConsumerDistribution& dist, const MarketParams& params,
                            const Mechanism& mech, double price, bool is_equilibrium,
                            bool price_unused) {
  MarketOutcome out;
  out.mechanism = mech;
  out.uniform_a = price;
  out.transfer = mech.transfer;
  out.equilibrium_price = is_equilibrium;
  out.uniform_price_unused = price_unused;

  const MarketParams p = params;
  out.schedule.uniform_a = price;
  out.schedule.personalized_a = [p](double th) {
    return best_response_pair_shared(th, p).first;
  };
  const Mechanism m = mech;
  const double up = price;
  out.schedule.personalized_b = [p, m, up](double th) {
    if (m.covers(th)) return best_response_pair_shared(th, p).second;
    return best_response_b_unshared(th, up, p);
  };
  out.utility_of = [p, m, up](double th) { return consumer_utility_under(p, m, up, th); };

  // Segment boundaries: every point where the serving firm or the price
  // formula can change.
  std::vector<double> cuts{0.0, 1.0, 0.5, mu(price, params)};
  const double cap_cross = (params.v - price) / params.t;  // indifference meets cap
  if (cap_cross > 0.0 && cap_cross < 1.0) cuts.push_back(cap_cross);
  for (double e : mech.shared.endpoints()) cuts.push_back(e);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return b - a < kMergeTol; }),
             cuts.end());

  std::vector<IntervalSet::Interval> seg_au, seg_ap, seg_bp;
  const double mu_u = mu_unclamped(price, params);

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi - lo <= kMergeTol) continue;
    const double mid = 0.5 * (lo + hi);
    const IntervalSet seg = IntervalSet::interval(lo, hi);

    // The segment's own price/utility formulas (not the global utility_of):
    // at segment endpoints the global function may take the neighboring
    // branch's value, which is measure-zero but breaks quadrature.
    std::function<double(double)> util_fn;
    if (mech.shared.contains(mid)) {
      if (mid < 0.5) {
        seg_ap.push_back({lo, hi});
        out.profit_a_gross += dist.integrate(
            [p](double th) { return best_response_pair_shared(th, p).first; }, seg);
        util_fn = [p](double th) {
          return consumer_utility(th, Firm::A, best_response_pair_shared(th, p).first, p);
        };
      } else {
        seg_bp.push_back({lo, hi});
        out.profit_b_gross += dist.integrate(
            [p](double th) { return best_response_pair_shared(th, p).second; }, seg);
        util_fn = [p](double th) {
          return consumer_utility(th, Firm::B, best_response_pair_shared(th, p).second, p);
        };
      }
    } else if (mid < mu_u) {
      seg_au.push_back({lo, hi});
      out.profit_a_gross += price * dist.mass(seg);
      util_fn = [p, up](double th) { return consumer_utility(th, Firm::A, up, p); };
    } else {
      seg_bp.push_back({lo, hi});
      out.profit_b_gross += dist.integrate(
          [p, up](double th) { return best_response_b_unshared(th, up, p); }, seg);
      util_fn = [p, up](double th) {
        return consumer_utility(th, Firm::B, best_response_b_unshared(th, up, p), p);
      };
    }
    out.consumer_welfare += dist.integrate(util_fn, seg);
  }

  out.a_uniform = IntervalSet::from_pairs(std::move(seg_au));
  out.a_personalized = IntervalSet::from_pairs(std::move(seg_ap));
  out.b_personalized = IntervalSet::from_pairs(std::move(seg_bp));
  out.profit_a_net = out.profit_a_gross - out.transfer;
  out.profit_b_net = out.profit_b_gross + out.transfer;
  return out;
}

}  // namespace

std::pair<EquilibriumSet, MarketOutcome> no_sharing_equilibrium(
    const ConsumerDistribution& dist, const MarketParams& params) {
  EquilibriumSet eq;
  eq.candidate_prices = maximize_uniform_price(dist, params, IntervalSet{});
  if (eq.candidate_prices.empty())
    throw std::logic_error("no-sharing objective degenerate");  // cannot happen: t > 0
  eq.selected = eq.candidate_prices.back();
  MarketOutcome outcome =
      build_outcome(dist, params, Mechanism{}, eq.selected, true, false);
  return {std::move(eq), std::move(outcome)};
}

MarketOutcome mechanism_equilibrium(const ConsumerDistribution& dist,
                                    const MarketParams& params, const Mechanism& mech,
                                    PriceSelection selection) {
  const auto candidates = maximize_uniform_price(dist, params, mech.shared);
  const bool degenerate = candidates.empty();
  const double best_value =
      degenerate ? 0.0
                 : uniform_price_objective(dist, params, mech.shared, candidates.back());

  if (selection.mode == PriceSelection::Mode::firm_preferred) {
    const double price = degenerate ? params.v - params.t / 2.0 : candidates.back();
    return build_outcome(dist, params, mech, price, true, degenerate);
  }

  if (!(selection.price >= 0.0)) throw std::domain_error("uniform price must be nonnegative");
  const double value = uniform_price_objective(dist, params, mech.shared, selection.price);
  const bool is_eq = value >= best_value - kDefaultTol * std::max(1.0, params.t);
  return build_outcome(dist, params, mech, selection.price, is_eq, degenerate);
}

std::vector<double> outcome_utilities(const MarketOutcome& outcome,
                                      std::span<const double> thetas) {
  std::vector<double> out;
  out.reserve(thetas.size());
  for (double th : thetas) out.push_back(outcome.utility_of(th));
  return out;
}

}  // namespace datamarket
