#include "datamarket/optin.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace datamarket {
namespace optin {

bool feasible(const Mechanism& mech, const OptInProfile& profile, double tol) {
  if (!mech.shared.subset_of(profile.opted_in, tol)) return false;
  for (double d : profile.dropped_points)
    if (mech.covers(d)) return false;
  const auto opted = [&](double th) {
    for (double j : profile.joined_points)
      if (std::abs(j - th) <= kMergeTol) return true;
    for (double d : profile.dropped_points)
      if (std::abs(d - th) <= kMergeTol) return false;
    return profile.opted_in.contains(th);
  };
  for (double s : mech.shared_points)
    if (!opted(s)) return false;
  return true;
}

std::pair<OptInProfile, MechanismPolicy> prop4_policy(const ConsumerDistribution& dist,
                                                      const MarketParams& params,
                                                      double baseline_price,
                                                      double overline_theta) {
  const double m = mu(baseline_price, params);
  const double shared_hi = 0.25 + 0.5 * m;
  if (!(overline_theta >= shared_hi - kDefaultTol) || overline_theta > 1.0)
    throw std::domain_error("overline_theta must lie in [1/4 + mu/2, 1]");

  const MechanismReport pareto = pareto_improving_mechanism(dist, params, baseline_price);

  OptInProfile profile;
  profile.opted_in = IntervalSet::interval(m, overline_theta);

  MechanismPolicy policy;
  policy.base = pareto.mechanism;
  policy.base_price = baseline_price;

  const Mechanism base = pareto.mechanism;
  const IntervalSet opted = profile.opted_in;
  policy.drop_rule = [base, opted](double theta) {
    if (!opted.contains(theta)) return Mechanism{};  // not a unilateral drop
    Mechanism mech = base;
    if (base.shared.contains(theta)) mech.withheld_points.push_back(theta);
    return mech;
  };
  policy.join_rule = [base, opted](double theta) {
    if (opted.contains(theta)) return Mechanism{};  // not a unilateral join
    Mechanism mech = base;
    const double lo = base.shared.intervals().front().first;
    if (theta < lo) mech.shared_points.push_back(theta);
    return mech;
  };
  policy.price_rule = [baseline_price](const Mechanism&, double) { return baseline_price; };
  return {std::move(profile), std::move(policy)};
}

namespace {

using IntervalKey = std::vector<IntervalSet::Interval>;

// Best total gross profit over single-interval mechanisms feasible for C
// (plus the empty mechanism), firm-preferred pricing. Endpoint candidates are
// the lattice restricted to C plus C's own endpoints and the analytic
// breakpoints of the model.
double best_feasible_profit(const ConsumerDistribution& dist, const MarketParams& params,
                            const IntervalSet& opted_in, double baseline_price,
                            int n_lattice) {
  std::vector<double> pts = opted_in.endpoints();
  for (int i = 0; i <= n_lattice; ++i) {
    const double x = static_cast<double>(i) / n_lattice;
    if (opted_in.contains(x, kMergeTol)) pts.push_back(x);
  }
  const double m = mu(baseline_price, params);
  for (double x : {m, 0.25 + 0.5 * m, 0.5})
    if (opted_in.contains(x, kMergeTol)) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return b - a < kMergeTol; }),
            pts.end());

  // The no-mechanism option plays out at the no-sharing equilibrium price,
  // whatever price the policy under test attaches to its base mechanism.
  const MarketOutcome none = mechanism_equilibrium(dist, params, Mechanism{});
  double best = none.profit_a_gross + none.profit_b_gross;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const IntervalSet shared = IntervalSet::interval(pts[i], pts[j]);
      if (!shared.subset_of(opted_in)) continue;
      const MarketOutcome oc = mechanism_equilibrium(dist, params, Mechanism{shared, 0.0});
      best = std::max(best, oc.profit_a_gross + oc.profit_b_gross);
    }
  }
  return best;
}

}  // namespace

TfneVerdict verify_tfne(const ConsumerDistribution& dist, const MarketParams& params,
                        const OptInProfile& profile, const MechanismPolicy& policy,
                        const TfneOptions& options) {
  TfneVerdict verdict;
  const auto violate = [&](int bullet, double theta, std::string detail) {
    verdict.holds = false;
    verdict.violations.push_back({bullet, theta, std::move(detail)});
  };

  // IR reference: the status-quo no-sharing equilibrium (firm-preferred
  // price), independent of the price attached to the policy's base mechanism.
  const MarketOutcome baseline = no_sharing_equilibrium(dist, params).second;

  // Caches: deviation mechanisms differ from the base only on null sets, so
  // price-equilibrium, profits, and the bullet-4 scan repeat heavily.
  std::map<IntervalKey, double> best_objective_cache;
  std::map<IntervalKey, double> best_feasible_cache;
  std::map<std::pair<IntervalKey, double>, std::pair<double, double>> profit_cache;

  const auto price_is_equilibrium = [&](const Mechanism& mech, double price) {
    const IntervalKey key = mech.shared.intervals();
    auto it = best_objective_cache.find(key);
    if (it == best_objective_cache.end()) {
      const auto cands = maximize_uniform_price(dist, params, mech.shared);
      const double best =
          cands.empty() ? 0.0
                        : uniform_price_objective(dist, params, mech.shared, cands.back());
      it = best_objective_cache.emplace(key, best).first;
    }
    return uniform_price_objective(dist, params, mech.shared, price) >=
           it->second - options.tol;
  };

  const auto gross_profits = [&](const Mechanism& mech, double price) {
    const auto key = std::make_pair(mech.shared.intervals(), price);
    auto it = profit_cache.find(key);
    if (it == profit_cache.end()) {
      const MarketOutcome oc =
          mechanism_equilibrium(dist, params, mech, PriceSelection::given(price));
      it = profit_cache.emplace(key, std::make_pair(oc.profit_a_gross, oc.profit_b_gross))
               .first;
    }
    return it->second;
  };

  const auto check_bullet4 = [&](const Mechanism& mech, double price, double theta) {
    const auto [pa, pb] = gross_profits(mech, price);
    if (!ir_transfer_range(baseline, [&] {
          MarketOutcome oc;
          oc.profit_a_gross = pa;
          oc.profit_b_gross = pb;
          return oc;
        }()))
      violate(4, theta, "deviation mechanism is not IR");
    const IntervalKey key = profile.opted_in.intervals();
    auto it = best_feasible_cache.find(key);
    if (it == best_feasible_cache.end())
      it = best_feasible_cache
               .emplace(key, best_feasible_profit(dist, params, profile.opted_in,
                                                  policy.base_price, options.n_lattice))
               .first;
    if (pa + pb < it->second - options.tol)
      violate(4, theta, "deviation mechanism is not jointly firm-optimal");
  };

  // Base mechanism: feasibility and price-equilibrium.
  if (!feasible(policy.base, profile))
    violate(1, -1.0, "base mechanism infeasible for C*");
  if (!price_is_equilibrium(policy.base, policy.base_price))
    violate(1, -1.0, "base uniform price is not an equilibrium price");
  check_bullet4(policy.base, policy.base_price, -1.0);

  // Deviation sample: theta grid plus breakpoints.
  std::vector<double> thetas;
  for (int i = 0; i <= options.n_theta; ++i)
    thetas.push_back(static_cast<double>(i) / options.n_theta);
  for (double e : profile.opted_in.endpoints()) thetas.push_back(e);
  for (double e : policy.base.shared.endpoints()) thetas.push_back(e);
  thetas.push_back(mu(policy.base_price, params));
  thetas.push_back(0.5);
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

  const auto utility_under = [&](const Mechanism& mech, double price, double theta) {
    return consumer_utility_under(params, mech, price, theta);
  };
  const double u_tol = kDefaultTol;

  for (double theta : thetas) {
    const bool in_star = profile.opted_in.contains(theta);
    const Mechanism dev = in_star ? policy.drop_rule(theta) : policy.join_rule(theta);
    const double dev_price = policy.price_rule(dev, theta);
    const OptInProfile dev_profile = in_star ? profile.drop(theta) : profile.join(theta);

    if (!feasible(dev, dev_profile))
      violate(1, theta, "deviation mechanism infeasible");
    if (!price_is_equilibrium(dev, dev_price))
      violate(1, theta, "deviation uniform price is not an equilibrium price");

    const double u_base = utility_under(policy.base, policy.base_price, theta);
    const double u_dev = utility_under(dev, dev_price, theta);
    if (u_base < u_dev - u_tol)
      violate(in_star ? 2 : 3, theta,
              in_star ? "consumer gains by opting out" : "consumer gains by opting in");

    check_bullet4(dev, dev_price, theta);
  }
  return verdict;
}

ConsumerOptimalScanReport consumer_optimal_scan(const ConsumerDistribution& dist,
                                                const MarketParams& params,
                                                double baseline_price, int n_lattice) {
  require_baseline_price(dist, params, baseline_price);
  const MarketOutcome baseline = mechanism_equilibrium(
      dist, params, Mechanism{}, PriceSelection::given(baseline_price));
  const double baseline_total = baseline.profit_a_gross + baseline.profit_b_gross;
  const MechanismReport pareto = pareto_improving_mechanism(dist, params, baseline_price);

  ConsumerOptimalScanReport report;
  report.n_lattice = n_lattice;
  report.reference_consumer_welfare = pareto.outcome.consumer_welfare;

  // Endpoint lattice, augmented with the Pareto mechanism's own endpoints so
  // it appears in the scan even off-lattice.
  const double m = mu(baseline_price, params);
  const double extra[] = {m, 0.25 + 0.5 * m};
  const auto entries =
      scan_interval_mechanisms(dist, params, baseline, n_lattice, extra);

  std::vector<double> pts;
  for (int i = 0; i <= n_lattice; ++i) pts.push_back(static_cast<double>(i) / n_lattice);
  pts.push_back(extra[0]);
  pts.push_back(extra[1]);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return b - a < kMergeTol; }),
            pts.end());
  const std::size_t n = pts.size();

  const auto index_of = [&](double x) {
    const auto it = std::lower_bound(pts.begin(), pts.end(), x - kMergeTol);
    return static_cast<std::size_t>(it - pts.begin());
  };

  std::vector<std::vector<const IntervalScanEntry*>> cell(
      n, std::vector<const IntervalScanEntry*>(n, nullptr));
  for (const auto& e : entries) cell[index_of(e.lo)][index_of(e.hi)] = &e;

  // best[i][j]: max total profit over lattice mechanisms inside [pts[i], pts[j]].
  std::vector<std::vector<double>> best(n, std::vector<double>(n, baseline_total));
  for (std::size_t span = 1; span < n; ++span) {
    for (std::size_t i = 0; i + span < n; ++i) {
      const std::size_t j = i + span;
      double b = cell[i][j] ? cell[i][j]->total_profit : baseline_total;
      b = std::max(b, best[i + 1][j]);
      b = std::max(b, best[i][j - 1]);
      best[i][j] = b;
    }
  }

  const double cw_ref = report.reference_consumer_welfare;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {  // C = [pts[i], pts[j]]
      for (std::size_t a = i; a <= j; ++a) {
        for (std::size_t b = a + 1; b <= j; ++b) {  // M = [pts[a], pts[b]]
          const IntervalScanEntry* e = cell[a][b];
          if (!e || !e->consumer_pareto) continue;
          if (e->consumer_welfare <= cw_ref + kDefaultTol) continue;
          if (e->total_profit >= best[i][j] - kDefaultTol)
            report.counterexamples.push_back(
                {IntervalSet::interval(pts[i], pts[j]),
                 IntervalSet::interval(pts[a], pts[b]), e->consumer_welfare,
                 e->total_profit});
        }
      }
    }
  }

  const std::size_t pi = index_of(extra[0]);
  const std::size_t pj = index_of(extra[1]);
  if (const IntervalScanEntry* e = cell[pi][pj])
    report.pareto_mechanism_firm_chosen = e->total_profit >= best[pi][pj] - kDefaultTol;
  return report;
}

}  // namespace optin
}  // namespace datamarket
