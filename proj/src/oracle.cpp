#include "datamarket/oracle.hpp"

#include <algorithm>
#include <cmath>

// The slow path never calls the closed-form solvers: serving firms, best
// responses and the indifference location are all rediscovered by bisection
// against the utility primitive, and every integral is a midpoint Riemann sum.

namespace datamarket {
namespace oracle {

namespace {

constexpr int kBisectIters = 64;

// Does the consumer choose B at price pb, against outside offer ua from A?
// Ties go to B whenever B personalizes and A does not; when both personalize
// the closer firm wins, with theta = 1/2 going to B.
bool b_wins(const MarketParams& params, double theta, double ua, double pb,
            bool a_personalizes) {
  const double ub = consumer_utility(theta, Firm::B, pb, params);
  if (ub < 0.0 && ua < 0.0) return false;
  if (ub > ua) return ub >= 0.0;
  if (ub == ua) return a_personalizes ? theta >= 0.5 : true;
  return false;
}

// Largest price at which B still wins the consumer; requires b_wins at 0.
double b_max_winning_price(const MarketParams& params, double theta, double ua,
                           bool a_personalizes) {
  double lo = 0.0, hi = params.v + params.t;
  for (int i = 0; i < kBisectIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    (b_wins(params, theta, ua, mid, a_personalizes) ? lo : hi) = mid;
  }
  return lo;
}

bool a_wins_personalized(const MarketParams& params, double theta, double ub, double pa) {
  const double ua = consumer_utility(theta, Firm::A, pa, params);
  if (ua < 0.0 && ub < 0.0) return false;
  if (ua > ub) return ua >= 0.0;
  if (ua == ub) return theta < 0.5;
  return false;
}

double a_max_winning_price(const MarketParams& params, double theta, double ub) {
  double lo = 0.0, hi = params.v + params.t;
  for (int i = 0; i < kBisectIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    (a_wins_personalized(params, theta, ub, mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

ConsumerPoint consumer_point(const MarketParams& params, double uniform_price, bool shared,
                             double theta) {
  ConsumerPoint pt;
  if (shared) {
    // Both firms personalize; the loser is driven to price 0 and the winner
    // charges the largest price that still wins.
    const double ua0 = consumer_utility(theta, Firm::A, 0.0, params);
    if (b_wins(params, theta, ua0, 0.0, /*a_personalizes=*/true)) {
      pt.firm = Firm::B;
      pt.price = b_max_winning_price(params, theta, ua0, true);
    } else {
      pt.firm = Firm::A;
      const double ub0 = consumer_utility(theta, Firm::B, 0.0, params);
      pt.price = a_max_winning_price(params, theta, ub0);
    }
  } else {
    const double ua = consumer_utility(theta, Firm::A, uniform_price, params);
    if (b_wins(params, theta, ua, 0.0, /*a_personalizes=*/false)) {
      pt.firm = Firm::B;
      pt.price = b_max_winning_price(params, theta, ua, false);
    } else {
      pt.firm = Firm::A;
      pt.price = uniform_price;
    }
  }
  pt.utility = consumer_utility(theta, pt.firm, pt.price, params);
  return pt;
}

namespace {

// Location below which consumers prefer A's uniform offer to B at price 0,
// found by bisection on the utility gap.
double indifference_location(const MarketParams& params, double uniform_price) {
  const auto gap = [&](double th) {
    return consumer_utility(th, Firm::A, uniform_price, params) -
           consumer_utility(th, Firm::B, 0.0, params);
  };
  if (gap(0.0) <= 0.0) return 0.0;
  if (gap(1.0) > 0.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < kBisectIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return lo;
}

struct Panels {
  std::vector<double> mid, weight;  // f(mid) * width baked into weight
  std::vector<double> lo, hi;
};

Panels make_panels(const ConsumerDistribution& dist, int n_theta,
                   std::vector<double> extra_boundaries) {
  std::vector<double> bounds;
  bounds.reserve(n_theta + 1 + extra_boundaries.size());
  for (int i = 0; i <= n_theta; ++i)
    bounds.push_back(static_cast<double>(i) / n_theta);
  for (double b : extra_boundaries)
    if (b > 0.0 && b < 1.0) bounds.push_back(b);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double a, double b) { return b - a < 1e-14; }),
               bounds.end());
  Panels p;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const double lo = bounds[i], hi = bounds[i + 1];
    const double mid = 0.5 * (lo + hi);
    p.lo.push_back(lo);
    p.hi.push_back(hi);
    p.mid.push_back(mid);
    p.weight.push_back(dist.density(mid) * (hi - lo));
  }
  return p;
}

// Riemann prefix mass M(x) over the panel set, linear within panels.
struct PrefixMass {
  std::vector<double> hi, cum;  // cum[i]: mass of [0, hi[i]]

  explicit PrefixMass(const Panels& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.mid.size(); ++i) {
      acc += p.weight[i];
      hi.push_back(p.hi[i]);
      cum.push_back(acc);
    }
  }

  double at(double x) const {
    if (x <= 0.0) return 0.0;
    const auto it = std::lower_bound(hi.begin(), hi.end(), x);
    if (it == hi.end()) return cum.back();
    const std::size_t i = static_cast<std::size_t>(it - hi.begin());
    const double prev_hi = i == 0 ? 0.0 : hi[i - 1];
    const double prev_cum = i == 0 ? 0.0 : cum[i - 1];
    const double w = (x - prev_hi) / (hi[i] - prev_hi);
    return prev_cum + w * (cum[i] - prev_cum);
  }

  double over(double lo, double hi_) const { return at(hi_) - at(lo); }
};

double grid_uniform_price(const MarketParams& params, const PrefixMass& mass,
                          const std::vector<double>& cutoffs, const IntervalSet& shared,
                          double cap, int n_price) {
  double best_value = 0.0, best_price = params.v - params.t / 2.0;
  bool any = false;
  for (int i = 0; i <= n_price; ++i) {
    const double p = cap * i / n_price;
    const double cutoff = cutoffs[i];
    double m = mass.at(cutoff);
    for (const auto& [lo, hi] : shared.intervals())
      if (std::min(hi, cutoff) > lo) m -= mass.over(lo, std::min(hi, cutoff));
    const double value = p * std::max(0.0, m);
    if (value > 1e-12 && value >= best_value) {  // ties broken upward
      best_value = value;
      best_price = p;
      any = true;
    }
  }
  return any ? best_price : params.v - params.t / 2.0;
}

}  // namespace

double oracle_uniform_price(const ConsumerDistribution& dist, const MarketParams& params,
                            const IntervalSet& shared, const GridConfig& grid) {
  const double cap = grid.price_cap > 0.0 ? grid.price_cap : params.v;
  const Panels panels = make_panels(dist, grid.n_theta, shared.endpoints());
  const PrefixMass mass(panels);
  std::vector<double> cutoffs(grid.n_price + 1);
  for (int i = 0; i <= grid.n_price; ++i)
    cutoffs[i] = indifference_location(params, cap * i / grid.n_price);
  return grid_uniform_price(params, mass, cutoffs, shared, cap, grid.n_price);
}

MarketOutcome oracle_outcome(const ConsumerDistribution& dist, const MarketParams& params,
                             const Mechanism& mech, double uniform_price,
                             const GridConfig& grid) {
  std::vector<double> extra = mech.shared.endpoints();
  extra.push_back(0.5);
  extra.push_back(indifference_location(params, uniform_price));
  const Panels panels = make_panels(dist, grid.n_theta, std::move(extra));

  MarketOutcome out;
  out.mechanism = mech;
  out.uniform_a = uniform_price;
  out.transfer = mech.transfer;
  out.schedule.uniform_a = uniform_price;

  const MarketParams p = params;
  const Mechanism m = mech;
  out.utility_of = [p, m, uniform_price](double th) {
    return consumer_point(p, uniform_price, m.covers(th), th).utility;
  };
  out.schedule.personalized_b = [p, m, uniform_price](double th) {
    return consumer_point(p, uniform_price, m.covers(th), th).price;
  };

  std::vector<IntervalSet::Interval> seg_au, seg_ap, seg_bp;
  for (std::size_t i = 0; i < panels.mid.size(); ++i) {
    const double th = panels.mid[i];
    const bool shared = mech.shared.contains(th);
    const ConsumerPoint pt = consumer_point(params, uniform_price, shared, th);
    if (pt.firm == Firm::A)
      out.profit_a_gross += pt.price * panels.weight[i];
    else
      out.profit_b_gross += pt.price * panels.weight[i];
    out.consumer_welfare += pt.utility * panels.weight[i];

    if (pt.firm == Firm::A && shared)
      seg_ap.push_back({panels.lo[i], panels.hi[i]});
    else if (pt.firm == Firm::A)
      seg_au.push_back({panels.lo[i], panels.hi[i]});
    else
      seg_bp.push_back({panels.lo[i], panels.hi[i]});
  }
  out.a_uniform = IntervalSet::from_pairs(std::move(seg_au));
  out.a_personalized = IntervalSet::from_pairs(std::move(seg_ap));
  out.b_personalized = IntervalSet::from_pairs(std::move(seg_bp));
  out.profit_a_net = out.profit_a_gross - out.transfer;
  out.profit_b_net = out.profit_b_gross + out.transfer;
  return out;
}

std::pair<IntervalSet, double> oracle_best_interval(
    const ConsumerDistribution& dist, const MarketParams& params, ScanObjective objective,
    const GridConfig& grid, int n_lattice, const MarketOutcome* baseline) {
  if (objective == ScanObjective::total_profit_pareto_constrained && baseline == nullptr)
    throw std::invalid_argument("pareto-constrained scan needs a baseline outcome");

  const double cap = grid.price_cap > 0.0 ? grid.price_cap : params.v;
  std::vector<double> cutoffs(grid.n_price + 1);
  for (int i = 0; i <= grid.n_price; ++i)
    cutoffs[i] = indifference_location(params, cap * i / grid.n_price);

  // Price-grid snapping shifts every utility by up to one grid step, so the
  // Pareto filter cannot resolve finer than that.
  const double pareto_slack = 1e-6 + 2.0 * cap / grid.n_price;

  IntervalSet best_set;
  double best_value = -1.0;
  for (int ia = 0; ia <= n_lattice; ++ia) {
    for (int ib = ia; ib <= n_lattice; ++ib) {
      const double a = static_cast<double>(ia) / n_lattice;
      const double b = static_cast<double>(ib) / n_lattice;
      const IntervalSet shared = IntervalSet::interval(a, b);

      const Panels panels = make_panels(dist, grid.n_theta, {a, b, 0.5});
      const PrefixMass mass(panels);
      const double price =
          grid_uniform_price(params, mass, cutoffs, shared, cap, grid.n_price);

      double total = 0.0;
      bool pareto_ok = true;
      for (std::size_t i = 0; i < panels.mid.size(); ++i) {
        const double th = panels.mid[i];
        const ConsumerPoint pt =
            consumer_point(params, price, shared.contains(th), th);
        total += pt.price * panels.weight[i];
        if (objective == ScanObjective::total_profit_pareto_constrained && pareto_ok &&
            pt.utility < baseline->utility_of(th) - pareto_slack)
          pareto_ok = false;
      }
      if (objective == ScanObjective::total_profit_pareto_constrained && !pareto_ok)
        continue;
      if (total > best_value) {
        best_value = total;
        best_set = shared;
      }
    }
  }
  return {best_set, best_value};
}

}  // namespace oracle
}  // namespace datamarket
