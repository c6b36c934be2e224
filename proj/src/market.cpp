#include "datamarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace datamarket {

namespace {

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::domain_error("theta must lie in [0,1]");
}

void check_price(double price) {
  if (!(price >= 0.0)) throw std::domain_error("price must be nonnegative");
}

}  // namespace

double mu_unclamped(double price, const MarketParams& params) {
  check_price(price);
  return 0.5 - price / (2.0 * params.t);
}

double mu(double price, const MarketParams& params) {
  return std::clamp(mu_unclamped(price, params), 0.0, 1.0);
}

double consumer_utility(double theta, Firm firm, double price, const MarketParams& params) {
  check_theta(theta);
  check_price(price);
  const double dist = firm == Firm::A ? theta : 1.0 - theta;
  return params.v - price - params.t * dist;
}

double best_response_b_unshared(double theta, double uniform_a, const MarketParams& params) {
  check_theta(theta);
  check_price(uniform_a);
  const double indifference = uniform_a + params.t * (2.0 * theta - 1.0);
  const double participation_cap = params.v - params.t * (1.0 - theta);
  return std::min(std::max(0.0, indifference), participation_cap);
}

std::pair<double, double> best_response_pair_shared(double theta, const MarketParams& params) {
  check_theta(theta);
  return {std::max(params.t * (1.0 - 2.0 * theta), 0.0),
          std::max(params.t * (2.0 * theta - 1.0), 0.0)};
}

DirectEffectReport direct_effect(double theta, double uniform_a, const MarketParams& params) {
  check_theta(theta);
  check_price(uniform_a);
  const double t = params.t;
  const double m = mu(uniform_a, params);

  DirectEffectReport rep{};
  rep.at_case_boundary = theta == m || theta == 0.5;
  if (theta > 0.5) {
    // Consumer stays with B, which now prices at t(2 theta - 1) instead of
    // p_A + t(2 theta - 1).
    rep.effect_case = DirectEffectCase::b_keeps_lower_price;
    rep.delta_profit_b = -uniform_a;
    rep.delta_consumer = uniform_a;
  } else if (theta >= m) {
    // Consumer switches from B to A; A serves at t(1 - 2 theta).
    // Boundaries mu and 1/2 resolve into this closed interval.
    rep.effect_case = DirectEffectCase::switch_to_a;
    rep.delta_profit_a = t * (1.0 - 2.0 * theta);
    rep.delta_profit_b = -(uniform_a + t * (2.0 * theta - 1.0));
    rep.delta_consumer = uniform_a - t * (1.0 - 2.0 * theta);
    rep.net_gain_positive = theta < 0.5 * (m + 0.5);
  } else {
    // Consumer keeps buying from A but at the higher personalized price.
    rep.effect_case = DirectEffectCase::a_keeps_higher_price;
    rep.delta_profit_a = t * (1.0 - 2.0 * theta) - uniform_a;
    rep.delta_consumer = -(t * (1.0 - 2.0 * theta) - uniform_a);
  }
  return rep;
}

}  // namespace datamarket
