#include <doctest.h>

#include <random>

#include "datamarket/market.hpp"

using namespace datamarket;

namespace {
const MarketParams kStd(3.0, 1.0);
}

TEST_CASE("indifference point mu") {
  CHECK(mu(0.0, kStd) == doctest::Approx(0.5));
  CHECK(mu(1.0, kStd) == doctest::Approx(0.0));  // p = t
  CHECK(mu(0.5, kStd) == doctest::Approx(0.25));
  CHECK(mu(2.0, kStd) == 0.0);  // clamped
  CHECK(mu_unclamped(2.0, kStd) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(mu(-0.1, kStd), std::domain_error);
}

TEST_CASE("mu is strictly decreasing on [0,t]") {
  double prev = mu(0.0, kStd);
  for (int i = 1; i <= 100; ++i) {
    const double cur = mu(i / 100.0, kStd);
    CHECK(cur < prev);
    CHECK(cur >= 0.0);
    CHECK(cur <= 0.5);
    prev = cur;
  }
}

TEST_CASE("consumer utility") {
  CHECK(consumer_utility(0.0, Firm::A, 0.0, kStd) == doctest::Approx(3.0));
  CHECK(consumer_utility(1.0, Firm::A, 0.5, kStd) == doctest::Approx(1.5));
  CHECK(consumer_utility(0.75, Firm::B, 0.5, kStd) == doctest::Approx(2.25));
  CHECK_THROWS_AS(consumer_utility(1.5, Firm::A, 0.0, kStd), std::domain_error);
}

TEST_CASE("b best response against uniform price") {
  CHECK(best_response_b_unshared(0.75, 0.5, kStd) == doctest::Approx(1.0));
  CHECK(best_response_b_unshared(0.0, 0.5, kStd) == doctest::Approx(0.0));
  // participation cap binds at a near-monopoly uniform price
  CHECK(best_response_b_unshared(0.75, 2.5, kStd) == doctest::Approx(2.75));
}

TEST_CASE("personalized bertrand prices") {
  CHECK(best_response_pair_shared(0.5, kStd) ==
        std::pair<double, double>{0.0, 0.0});
  CHECK(best_response_pair_shared(0.0, kStd) == std::pair<double, double>{1.0, 0.0});
  CHECK(best_response_pair_shared(0.3, kStd).first == doctest::Approx(0.4));
  CHECK(best_response_pair_shared(0.3, kStd).second == doctest::Approx(0.0));
}

TEST_CASE("shared prices are mutual best responses on a grid") {
  // neither firm can raise a winning price or win at any nonnegative price
  for (int i = 0; i <= 50; ++i) {
    const double th = i / 50.0;
    const auto [pa, pb] = best_response_pair_shared(th, kStd);
    const double ua = consumer_utility(th, Firm::A, pa, kStd);
    const double ub = consumer_utility(th, Firm::B, pb, kStd);
    // the loser prices at cost and leaves the consumer exactly indifferent,
    // so comparisons need a rounding allowance
    if (th < 0.5) {
      CHECK(ua >= ub - 1e-12);  // A wins
      // raising A's price loses the consumer; B cannot win at pb >= 0
      CHECK(consumer_utility(th, Firm::A, pa + 1e-3, kStd) < ub);
      CHECK(consumer_utility(th, Firm::B, 0.0, kStd) <= ua + 1e-12);
    } else {
      CHECK(ub >= ua - 1e-12);
      CHECK(consumer_utility(th, Firm::B, pb + 1e-3, kStd) < ua);
      CHECK(consumer_utility(th, Firm::A, 0.0, kStd) <= ub + 1e-12);
    }
  }
}

TEST_CASE("direct effect cases") {
  SUBCASE("case 1: distant consumer keeps B at a discount") {
    const auto rep = direct_effect(0.75, 0.5, kStd);
    CHECK(rep.effect_case == DirectEffectCase::b_keeps_lower_price);
    CHECK(rep.delta_profit_b == doctest::Approx(-0.5));
    CHECK(rep.delta_consumer == doctest::Approx(0.5));
    CHECK(rep.delta_profit_a == 0.0);
  }
  SUBCASE("case 2: switcher") {
    const auto rep = direct_effect(0.3, 0.5, kStd);
    CHECK(rep.effect_case == DirectEffectCase::switch_to_a);
    CHECK(rep.delta_profit_a == doctest::Approx(0.4));
    CHECK(rep.delta_profit_b == doctest::Approx(-0.1));
    CHECK(rep.delta_consumer == doctest::Approx(0.1));
    CHECK(rep.net_gain_positive);  // 0.3 < (0.25 + 0.5)/2
  }
  SUBCASE("case 3: captive consumer pays more") {
    const auto rep = direct_effect(0.1, 0.5, kStd);
    CHECK(rep.effect_case == DirectEffectCase::a_keeps_higher_price);
    CHECK(rep.delta_consumer == doctest::Approx(-0.3));  // pays 0.8 instead of 0.5
    CHECK(rep.delta_profit_a == doctest::Approx(0.3));
  }
  SUBCASE("boundaries fold into case 2") {
    CHECK(direct_effect(0.25, 0.5, kStd).effect_case == DirectEffectCase::switch_to_a);
    CHECK(direct_effect(0.25, 0.5, kStd).at_case_boundary);
    const auto half = direct_effect(0.5, 0.5, kStd);
    CHECK(half.effect_case == DirectEffectCase::switch_to_a);
    CHECK(half.at_case_boundary);
    CHECK(half.delta_profit_a == doctest::Approx(0.0));
    CHECK(half.delta_profit_b == doctest::Approx(-0.5));
  }
}

TEST_CASE("case-2 net gain flips at the interval midpoint") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> price(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double p = price(rng);
    const double m = mu(p, kStd);
    const double midpoint = 0.5 * (m + 0.5);
    const auto below = direct_effect(midpoint - 1e-6, p, kStd);
    const auto above = direct_effect(midpoint + 1e-6, p, kStd);
    CHECK(below.net_gain_positive);
    CHECK_FALSE(above.net_gain_positive);
    CHECK(below.delta_profit_a + below.delta_profit_b > 0.0);
    CHECK(above.delta_profit_a + above.delta_profit_b < 0.0);
  }
}

TEST_CASE("per-theta surplus accounting") {
  // delta consumer + delta profits equals the transport-efficiency change:
  // zero in cases 1 and 3, the saved transport t(1-2 theta) in case 2.
  for (double p : {0.2, 0.5, 0.9}) {
    for (int i = 0; i <= 100; ++i) {
      const double th = i / 100.0;
      const auto rep = direct_effect(th, p, kStd);
      const double total = rep.delta_consumer + rep.delta_profit_a + rep.delta_profit_b;
      const double expected =
          rep.effect_case == DirectEffectCase::switch_to_a ? kStd.t * (1.0 - 2.0 * th) : 0.0;
      CHECK(total == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}
