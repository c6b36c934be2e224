#pragma once

#include <utility>
#include <vector>

#include "datamarket/distribution.hpp"
#include "datamarket/equilibrium.hpp"
#include "datamarket/types.hpp"

namespace datamarket {
namespace oracle {

/// Discretization of the slow verification path.
struct GridConfig {
  int n_theta = 2048;
  int n_price = 4096;
  double price_cap = 0.0;  // 0: use params.v

  GridConfig() = default;
  GridConfig(int nt, int np, double cap = 0.0) : n_theta(nt), n_price(np), price_cap(cap) {
    if (nt < 16 || np < 16) throw std::invalid_argument("oracle grids need >= 16 points");
  }
};

/// Serving firm and realized price/utility for one consumer, found by
/// bisecting best-response prices against the utility primitive only.
struct ConsumerPoint {
  Firm firm = Firm::A;
  double price = 0.0;
  double utility = 0.0;
};

/// Per-consumer outcome when theta's location is (or is not) shared with A,
/// firm A's uniform price held fixed.
ConsumerPoint consumer_point(const MarketParams& params, double uniform_price, bool shared,
                             double theta);

/// Brute-force argmax of firm A's uniform-price objective over the price
/// grid, ties broken upward; v - t/2 when the objective is identically zero.
double oracle_uniform_price(const ConsumerDistribution& dist, const MarketParams& params,
                            const IntervalSet& shared, const GridConfig& grid = {});

/// Riemann-sum replication of profits and welfare at a fixed uniform price.
MarketOutcome oracle_outcome(const ConsumerDistribution& dist, const MarketParams& params,
                             const Mechanism& mech, double uniform_price,
                             const GridConfig& grid = {});

enum class ScanObjective { total_profit, total_profit_pareto_constrained };

/// Exhaustive scan over single intervals [a,b] on an endpoint lattice.
/// The Pareto-constrained objective admits only mechanisms leaving every
/// consumer (on a theta grid) weakly better off than the baseline outcome.
std::pair<IntervalSet, double> oracle_best_interval(
    const ConsumerDistribution& dist, const MarketParams& params, ScanObjective objective,
    const GridConfig& grid = {}, int n_lattice = 64,
    const MarketOutcome* baseline = nullptr);

}  // namespace oracle
}  // namespace datamarket
