#include "datamarket/mechanisms.hpp"

#include <algorithm>
#include <cmath>

namespace datamarket {

std::optional<std::pair<double, double>> ir_transfer_range(
    const MarketOutcome& baseline, const MarketOutcome& with_sharing) {
  const double lower = baseline.profit_b_gross - with_sharing.profit_b_gross;
  const double upper = with_sharing.profit_a_gross - baseline.profit_a_gross;
  if (lower > upper) return std::nullopt;
  return std::make_pair(lower, upper);
}

namespace {

std::vector<double> comparison_grid(const MarketOutcome& baseline,
                                    const MarketOutcome& outcome, int n_grid) {
  std::vector<double> thetas;
  thetas.reserve(n_grid + 16);
  for (int i = 0; i <= n_grid; ++i) thetas.push_back(static_cast<double>(i) / n_grid);
  thetas.push_back(0.5);
  for (const auto* o : {&baseline, &outcome}) {
    for (double e : o->mechanism.shared.endpoints()) thetas.push_back(e);
    for (double e : o->a_uniform.endpoints()) thetas.push_back(e);
  }
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
  return thetas;
}

}  // namespace

ParetoFlags compute_pareto_flags(const MarketOutcome& baseline, const MarketOutcome& outcome,
                                 int n_grid) {
  ParetoFlags flags;
  flags.firms_ir = ir_transfer_range(baseline, outcome).has_value();
  flags.all_consumers_weak = true;
  for (double th : comparison_grid(baseline, outcome, n_grid)) {
    const double delta = outcome.utility_of(th) - baseline.utility_of(th);
    if (delta < -kDefaultTol) flags.all_consumers_weak = false;
    if (delta > kDefaultTol) flags.some_consumer_strict = true;
  }
  return flags;
}

void require_baseline_price(const ConsumerDistribution& dist, const MarketParams& params,
                            double baseline_price) {
  const auto candidates = maximize_uniform_price(dist, params, IntervalSet{});
  const double best =
      uniform_price_objective(dist, params, IntervalSet{}, candidates.back());
  const double at_price = uniform_price_objective(dist, params, IntervalSet{}, baseline_price);
  if (at_price < best - kDefaultTol * std::max(1.0, params.t))
    throw std::invalid_argument("baseline price is not a no-sharing equilibrium price");
}

namespace {

MechanismReport make_report(const ConsumerDistribution& dist, const MarketParams& params,
                            Mechanism mech, PriceSelection selection, double baseline_price) {
  MechanismReport rep;
  rep.baseline = mechanism_equilibrium(dist, params, Mechanism{},
                                       PriceSelection::given(baseline_price));
  rep.outcome = mechanism_equilibrium(dist, params, mech, selection);
  rep.ir_transfer_range = ir_transfer_range(rep.baseline, rep.outcome);
  rep.pareto_flags = compute_pareto_flags(rep.baseline, rep.outcome);
  rep.mechanism = std::move(mech);
  return rep;
}

}  // namespace

MechanismReport full_sharing_report(const ConsumerDistribution& dist,
                                    const MarketParams& params, double baseline_price) {
  require_baseline_price(dist, params, baseline_price);
  return make_report(dist, params, Mechanism{IntervalSet::full(), 0.0},
                     PriceSelection::firm_preferred(), baseline_price);
}

FirmOptimalReport firm_optimal_mechanism(const ConsumerDistribution& dist,
                                         const MarketParams& params) {
  const auto [eq, baseline_outcome] = no_sharing_equilibrium(dist, params);
  FirmOptimalReport rep;
  static_cast<MechanismReport&>(rep) =
      make_report(dist, params, Mechanism{IntervalSet::interval(0.0, 0.5), 0.0},
                  PriceSelection::firm_preferred(), eq.selected);
  const double tail_mass = 1.0 - dist.cdf(0.5);
  rep.condition_holds = params.v > 5.0 * params.t / (2.0 * tail_mass);
  rep.profit_lower_bound = (params.v - params.t / 2.0) * tail_mass;
  rep.rival_profit_cap = 2.0 * params.t;
  return rep;
}

MechanismReport pareto_improving_mechanism(const ConsumerDistribution& dist,
                                           const MarketParams& params,
                                           double baseline_price) {
  require_baseline_price(dist, params, baseline_price);
  const double m = mu(baseline_price, params);
  Mechanism mech{IntervalSet::interval(m, 0.25 + 0.5 * m), 0.0};
  MechanismReport rep = make_report(dist, params, mech, PriceSelection::given(baseline_price),
                                    baseline_price);
  if (!rep.outcome.equilibrium_price)
    throw std::logic_error(
        "baseline uniform price is not a best response under the Pareto mechanism");
  if (rep.ir_transfer_range) {
    const auto [lo, hi] = *rep.ir_transfer_range;
    rep.mechanism.transfer = 0.5 * (lo + hi);  // midpoint split, a convention
    rep.outcome.transfer = rep.mechanism.transfer;
    rep.outcome.mechanism.transfer = rep.mechanism.transfer;
    rep.outcome.profit_a_net = rep.outcome.profit_a_gross - rep.mechanism.transfer;
    rep.outcome.profit_b_net = rep.outcome.profit_b_gross + rep.mechanism.transfer;
  }
  return rep;
}

EpsilonReport epsilon_mechanism(const ConsumerDistribution& dist, const MarketParams& params,
                                double eps) {
  if (dist.kind() != ConsumerDistribution::Kind::uniform)
    throw std::invalid_argument("epsilon mechanism is derived for uniform consumers only");
  if (!(eps > 0.0 && eps <= 0.25)) throw std::domain_error("eps must lie in (0, 1/4]");

  const auto [eq, baseline_outcome] = no_sharing_equilibrium(dist, params);
  EpsilonReport rep;
  static_cast<MechanismReport&>(rep) =
      make_report(dist, params, Mechanism{IntervalSet::interval(eps, 0.5), 0.0},
                  PriceSelection::firm_preferred(), eq.selected);
  rep.eps = eps;
  const double t = params.t;
  rep.uniform_a_cf = t * (1.0 - 2.0 * eps);
  rep.profit_a_cf = t * (0.25 - eps * eps);
  rep.profit_b_cf = t * (0.75 - eps);
  rep.consumer_welfare_cf = params.v - t * (1.25 - eps - eps * eps);
  return rep;
}

std::vector<IntervalScanEntry> scan_interval_mechanisms(
    const ConsumerDistribution& dist, const MarketParams& params,
    const MarketOutcome& baseline, int n_lattice, std::span<const double> extra_endpoints) {
  std::vector<double> points;
  points.reserve(n_lattice + 1 + extra_endpoints.size());
  for (int i = 0; i <= n_lattice; ++i)
    points.push_back(static_cast<double>(i) / n_lattice);
  points.insert(points.end(), extra_endpoints.begin(), extra_endpoints.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(),
                           [](double a, double b) { return b - a < kMergeTol; }),
               points.end());

  std::vector<double> thetas;
  for (int i = 0; i <= 512; ++i) thetas.push_back(i / 512.0);

  std::vector<IntervalScanEntry> out;
  out.reserve(points.size() * (points.size() - 1) / 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const Mechanism mech{IntervalSet::interval(points[i], points[j]), 0.0};
      const MarketOutcome oc = mechanism_equilibrium(dist, params, mech);
      IntervalScanEntry e;
      e.lo = points[i];
      e.hi = points[j];
      e.uniform_price = oc.uniform_a;
      e.total_profit = oc.profit_a_gross + oc.profit_b_gross;
      e.consumer_welfare = oc.consumer_welfare;
      e.consumer_pareto = true;
      for (double th : thetas) {
        if (oc.utility_of(th) < baseline.utility_of(th) - kDefaultTol) {
          e.consumer_pareto = false;
          break;
        }
      }
      // interval endpoints and mu are the only kinks the theta grid can miss
      for (double th : {points[i], points[j], mu(oc.uniform_a, params), 0.5}) {
        if (e.consumer_pareto &&
            oc.utility_of(th) < baseline.utility_of(th) - kDefaultTol)
          e.consumer_pareto = false;
      }
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace datamarket
