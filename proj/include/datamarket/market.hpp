#pragma once

#include <utility>

#include "datamarket/types.hpp"

namespace datamarket {

enum class Firm { A, B };

/// Indifference location 1/2 - p/(2t), unclamped (diagnostic value).
double mu_unclamped(double price, const MarketParams& params);

/// Indifference location clamped to [0,1]: below it consumers prefer A's
/// uniform price to B's zero price.
double mu(double price, const MarketParams& params);

/// Utility v - price - t|theta - theta_i| of consumer theta buying from `firm`.
double consumer_utility(double theta, Firm firm, double price, const MarketParams& params);

/// Firm B's personalized best response against A's uniform price:
/// min(max{0, p_A + t(2 theta - 1)}, v - t(1 - theta)). The cap keeps the
/// consumer participating when the uniform outside option is very high.
double best_response_b_unshared(double theta, double uniform_a, const MarketParams& params);

/// Equilibrium personalized prices when both firms know theta:
/// (max{t(1-2 theta),0}, max{t(2 theta-1),0}). The closer firm wins; the tie
/// at theta = 1/2 goes to B.
std::pair<double, double> best_response_pair_shared(double theta, const MarketParams& params);

enum class DirectEffectCase {
  b_keeps_lower_price,   // theta in (1/2, 1]
  switch_to_a,           // theta in [mu(p_A), 1/2]
  a_keeps_higher_price,  // theta in [0, mu(p_A))
};

/// Profit and utility deltas of sharing a single consumer's location,
/// relative to no sharing at uniform price p_A.
struct DirectEffectReport {
  DirectEffectCase effect_case;
  double delta_profit_a = 0.0;
  double delta_profit_b = 0.0;
  double delta_consumer = 0.0;
  bool net_gain_positive = false;  // case 2 only: total firm profits rise
  bool at_case_boundary = false;   // theta equals mu(p_A) or 1/2 exactly
};

DirectEffectReport direct_effect(double theta, double uniform_a, const MarketParams& params);

}  // namespace datamarket
