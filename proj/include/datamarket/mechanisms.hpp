#pragma once

#include <optional>
#include <vector>

#include "datamarket/equilibrium.hpp"

namespace datamarket {

struct ParetoFlags {
  bool firms_ir = false;            // some transfer makes both firms weakly better off
  bool all_consumers_weak = false;  // no consumer loses (grid + breakpoints)
  bool some_consumer_strict = false;
};

/// A mechanism together with its equilibrium outcome, the no-sharing baseline
/// it is judged against, and the IR/Pareto certificates.
struct MechanismReport {
  Mechanism mechanism;
  MarketOutcome outcome;
  MarketOutcome baseline;
  std::optional<std::pair<double, double>> ir_transfer_range;
  ParetoFlags pareto_flags;
};

/// Transfers r under which both firms weakly gain:
/// [pi_B^0 - pi_B^M, pi_A^M - pi_A^0] (gross profits); empty when lower > upper.
std::optional<std::pair<double, double>> ir_transfer_range(const MarketOutcome& baseline,
                                                           const MarketOutcome& with_sharing);

/// Utility comparison against a baseline on a dense grid plus breakpoints.
ParetoFlags compute_pareto_flags(const MarketOutcome& baseline, const MarketOutcome& outcome,
                                 int n_grid = 512);

/// Full sharing M = ([0,1], 0) relative to the no-sharing equilibrium at
/// `baseline_price` (which must lie in P_A).
MechanismReport full_sharing_report(const ConsumerDistribution& dist,
                                    const MarketParams& params, double baseline_price);

struct FirmOptimalReport : MechanismReport {
  bool condition_holds = false;      // v > 5t / (2 (1 - F(1/2)))
  double profit_lower_bound = 0.0;   // (v - t/2)(1 - F(1/2))
  double rival_profit_cap = 0.0;     // 2t bound when the uniform price binds
};

/// The joint-profit-maximizing mechanism M = ([0,1/2], 0) at p_A = v - t/2.
/// When the sufficient condition fails the construction is still returned,
/// with condition_holds = false (optimality unverified).
FirmOptimalReport firm_optimal_mechanism(const ConsumerDistribution& dist,
                                         const MarketParams& params);

/// Pareto-improving mechanism M = ([mu(p_A), 1/4 + mu(p_A)/2], r) with the
/// baseline uniform price; r defaults to the midpoint of the IR range.
MechanismReport pareto_improving_mechanism(const ConsumerDistribution& dist,
                                           const MarketParams& params, double baseline_price);

struct EpsilonReport : MechanismReport {
  double eps = 0.0;
  // Closed forms, cross-asserted against the numeric outcome.
  double uniform_a_cf = 0.0;
  double profit_a_cf = 0.0;
  double profit_b_cf = 0.0;
  double consumer_welfare_cf = 0.0;
};

/// Mechanism ([eps, 1/2], 0) under uniform F, eps in (0, 1/4]: closed forms
/// p_A = t(1-2eps), pi_A = t(1/4 - eps^2), pi_B = t(3/4 - eps),
/// CW = v - t(5/4 - eps - eps^2).
EpsilonReport epsilon_mechanism(const ConsumerDistribution& dist, const MarketParams& params,
                                double eps);

/// One cell of the single-interval mechanism family ([lo,hi], 0) with
/// firm-preferred pricing; used by optimality scans.
struct IntervalScanEntry {
  double lo = 0.0, hi = 0.0;
  double uniform_price = 0.0;
  double total_profit = 0.0;
  double consumer_welfare = 0.0;
  bool consumer_pareto = false;  // weakly beneficial to every consumer vs baseline
};

/// Enumerates mechanisms ([a,b], 0) over an (n_lattice+1)-point endpoint
/// lattice, a <= b, plus any extra endpoints supplied.
std::vector<IntervalScanEntry> scan_interval_mechanisms(
    const ConsumerDistribution& dist, const MarketParams& params,
    const MarketOutcome& baseline, int n_lattice = 64,
    std::span<const double> extra_endpoints = {});

/// Checks that the no-sharing price is an equilibrium one, i.e. attains the
/// P_A objective maximum within tolerance.
void require_baseline_price(const ConsumerDistribution& dist, const MarketParams& params,
                            double baseline_price);

}  // namespace datamarket
