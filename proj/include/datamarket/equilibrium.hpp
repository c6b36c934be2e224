#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "datamarket/distribution.hpp"
#include "datamarket/market.hpp"
#include "datamarket/types.hpp"

namespace datamarket {

/// Firm A's uniform price plus both personalized schedules.
struct PriceSchedule {
  double uniform_a = 0.0;
  std::function<double(double)> personalized_a;  // defined on the shared set
  std::function<double(double)> personalized_b;  // defined on all of [0,1]
};

/// Full description of the market at a fixed mechanism and uniform price.
struct MarketOutcome {
  Mechanism mechanism;
  double uniform_a = 0.0;
  PriceSchedule schedule;

  IntervalSet a_uniform;       // consumers buying from A at the uniform price
  IntervalSet a_personalized;  // shared consumers won by A
  IntervalSet b_personalized;  // everyone else

  double profit_a_gross = 0.0;
  double profit_b_gross = 0.0;
  double transfer = 0.0;
  double profit_a_net = 0.0;
  double profit_b_net = 0.0;
  double consumer_welfare = 0.0;

  std::function<double(double)> utility_of;

  bool equilibrium_price = true;      // false: given price is not a best response
  bool uniform_price_unused = false;  // shared covers [0,1/2]; price set by convention
};

/// Candidate uniform prices attaining the no-sharing objective maximum.
struct EquilibriumSet {
  std::vector<double> candidate_prices;
  double selected = 0.0;  // firm-preferred (maximal) candidate
};

struct PriceSelection {
  enum class Mode { firm_preferred, given };
  Mode mode = Mode::firm_preferred;
  double price = 0.0;

  static PriceSelection firm_preferred() { return {}; }
  static PriceSelection given(double p) { return {Mode::given, p}; }
};

/// Firm A's uniform-price objective p * mass([0, mu(p)] \ shared).
double uniform_price_objective(const ConsumerDistribution& dist, const MarketParams& params,
                               const IntervalSet& shared, double price);

/// All global maximizers of the uniform-price objective (grid + golden section
/// + parabolic polish), largest last.
std::vector<double> maximize_uniform_price(const ConsumerDistribution& dist,
                                           const MarketParams& params,
                                           const IntervalSet& shared);

/// No-sharing subgame-perfect equilibria: the price set P_A and the outcome at
/// the firm-preferred (maximal) price.
std::pair<EquilibriumSet, MarketOutcome> no_sharing_equilibrium(
    const ConsumerDistribution& dist, const MarketParams& params);

/// Equilibrium outcome induced by an arbitrary mechanism. With firm_preferred
/// selection the uniform price maximizes A's objective; if that objective is
/// identically zero (shared covers [0,1/2]) the price is set to v - t/2.
MarketOutcome mechanism_equilibrium(const ConsumerDistribution& dist,
                                    const MarketParams& params, const Mechanism& mech,
                                    PriceSelection selection = PriceSelection::firm_preferred());

std::vector<double> outcome_utilities(const MarketOutcome& outcome,
                                      std::span<const double> thetas);

/// Utility of a single consumer under a mechanism and uniform price, honoring
/// measure-zero point deviations of the mechanism.
double consumer_utility_under(const MarketParams& params, const Mechanism& mech,
                              double uniform_price, double theta);

}  // namespace datamarket
