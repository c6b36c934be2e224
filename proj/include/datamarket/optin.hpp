#pragma once

#include <functional>
#include <string>
#include <vector>

#include "datamarket/mechanisms.hpp"

namespace datamarket {
namespace optin {

/// Consumers who agreed to have their data shared (the set C or C*).
/// Single-consumer deviations from a base profile are carried as point lists;
/// they change feasibility pointwise but never the set's measure.
struct OptInProfile {
  IntervalSet opted_in;
  std::vector<double> dropped_points;  // opted out individually
  std::vector<double> joined_points;   // opted in individually

  OptInProfile drop(double theta) const {
    OptInProfile p = *this;
    p.dropped_points.push_back(theta);
    return p;
  }
  OptInProfile join(double theta) const {
    OptInProfile p = *this;
    p.joined_points.push_back(theta);
    return p;
  }
};

/// Firms' strategy in the extended game: the mechanism chosen at the
/// equilibrium opt-in set and after every single-consumer deviation, plus the
/// uniform price attached to each.
struct MechanismPolicy {
  Mechanism base;
  double base_price = 0.0;
  std::function<Mechanism(double)> drop_rule;  // theta in C* withdraws
  std::function<Mechanism(double)> join_rule;  // theta outside C* opts in
  std::function<double(const Mechanism&, double)> price_rule;
};

struct TfneViolation {
  int bullet = 0;  // 1..4, per the equilibrium definition
  double theta = 0.0;
  std::string detail;
};

struct TfneVerdict {
  bool holds = true;
  std::vector<TfneViolation> violations;
};

/// Feasibility: shared set contained in the opt-in set up to measure zero;
/// shared points must have opted in individually.
bool feasible(const Mechanism& mech, const OptInProfile& profile, double tol = kDefaultTol);

/// The equilibrium construction behind the opt-in result: C* = [mu(p_A),
/// theta_bar], the Pareto-improving mechanism as base, and single-consumer
/// deviation mechanisms that change only the deviator's own price.
std::pair<OptInProfile, MechanismPolicy> prop4_policy(const ConsumerDistribution& dist,
                                                      const MarketParams& params,
                                                      double baseline_price,
                                                      double overline_theta);

struct TfneOptions {
  int n_theta = 65;           // deviation sample per side
  int n_lattice = 32;         // joint-optimality scan lattice
  double tol = 1e-7;
};

/// Checks the four equilibrium bullets on a theta grid plus breakpoints.
TfneVerdict verify_tfne(const ConsumerDistribution& dist, const MarketParams& params,
                        const OptInProfile& profile, const MechanismPolicy& policy,
                        const TfneOptions& options = {});

struct ScanCounterexample {
  IntervalSet opted_in;
  IntervalSet shared;
  double consumer_welfare = 0.0;
  double total_profit = 0.0;
};

struct ConsumerOptimalScanReport {
  int n_lattice = 0;
  double reference_consumer_welfare = 0.0;  // CW of the Pareto-improving mechanism
  bool pareto_mechanism_firm_chosen = false;
  std::vector<ScanCounterexample> counterexamples;
};

/// Desk-scale falsification of consumer optimality: enumerates opt-in
/// intervals C and feasible single-interval mechanisms M with firm-preferred
/// pricing; any consumer-Pareto M with strictly higher total consumer utility
/// than the Pareto-improving mechanism that the firms would still choose is a
/// counterexample (expected: none).
ConsumerOptimalScanReport consumer_optimal_scan(const ConsumerDistribution& dist,
                                                const MarketParams& params,
                                                double baseline_price, int n_lattice = 64);

}  // namespace optin
}  // namespace datamarket
