#include <doctest.h>

#include <random>

#include "datamarket/mechanisms.hpp"

using namespace datamarket;

namespace {
const MarketParams kStd(3.0, 1.0);
const ConsumerDistribution kUniform = ConsumerDistribution::uniform();
}  // namespace

TEST_CASE("baseline price validation") {
  CHECK_NOTHROW(require_baseline_price(kUniform, kStd, 0.5));
  CHECK_THROWS_AS(require_baseline_price(kUniform, kStd, 0.4), std::invalid_argument);
}

TEST_CASE("full sharing is not individually rational for the firms") {
  const auto rep = full_sharing_report(kUniform, kStd, 0.5);
  CHECK(rep.outcome.profit_a_gross == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(rep.outcome.profit_b_gross == doctest::Approx(0.25).epsilon(1e-9));
  CHECK_FALSE(rep.ir_transfer_range.has_value());
  CHECK_FALSE(rep.pareto_flags.firms_ir);
  // total profit falls from 0.6875 to 0.5
  CHECK(rep.outcome.profit_a_gross + rep.outcome.profit_b_gross <
        rep.baseline.profit_a_gross + rep.baseline.profit_b_gross);
  // consumers near A pay t(1-2 theta) > p_A and lose; distant ones gain p_A
  CHECK_FALSE(rep.pareto_flags.all_consumers_weak);
  CHECK(rep.pareto_flags.some_consumer_strict);
  CHECK(rep.outcome.utility_of(0.1) < rep.baseline.utility_of(0.1) - 1e-9);
  CHECK(rep.outcome.utility_of(0.9) ==
        doctest::Approx(rep.baseline.utility_of(0.9) + 0.5).epsilon(1e-9));
}

TEST_CASE("firm-optimal mechanism and its condition flag") {
  SUBCASE("v=6: condition holds") {
    const auto rep = firm_optimal_mechanism(kUniform, MarketParams(6.0, 1.0));
    CHECK(rep.condition_holds);  // 6 > 5/(2*0.5) = 5
    CHECK(rep.profit_lower_bound == doctest::Approx((6.0 - 0.5) * 0.5));
    CHECK(rep.rival_profit_cap == doctest::Approx(2.0));
    CHECK(rep.outcome.profit_a_gross == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(rep.outcome.profit_b_gross == doctest::Approx(6.0 / 2 - 0.125).epsilon(1e-9));
    CHECK(rep.outcome.profit_a_gross + rep.outcome.profit_b_gross >
          rep.baseline.profit_a_gross + rep.baseline.profit_b_gross);
  }
  SUBCASE("v=3: construction returned, condition false") {
    const auto rep = firm_optimal_mechanism(kUniform, kStd);
    CHECK_FALSE(rep.condition_holds);  // 3 < 5
    CHECK(rep.outcome.profit_b_gross == doctest::Approx(3.0 / 2 - 0.125).epsilon(1e-9));
  }
}

TEST_CASE("pareto-improving mechanism") {
  const auto rep = pareto_improving_mechanism(kUniform, kStd, 0.5);
  REQUIRE(rep.mechanism.shared.intervals().size() == 1);
  CHECK(rep.mechanism.shared.intervals()[0].first == doctest::Approx(0.25));
  CHECK(rep.mechanism.shared.intervals()[0].second == doctest::Approx(0.375));
  CHECK(rep.outcome.uniform_a == doctest::Approx(0.5));
  CHECK(rep.outcome.equilibrium_price);

  REQUIRE(rep.ir_transfer_range.has_value());
  CHECK(rep.ir_transfer_range->first == doctest::Approx(0.015625).epsilon(1e-9));
  CHECK(rep.ir_transfer_range->second == doctest::Approx(0.046875).epsilon(1e-9));
  // midpoint transfer convention, already applied to net profits
  CHECK(rep.mechanism.transfer == doctest::Approx(0.03125));
  CHECK(rep.outcome.profit_a_net ==
        doctest::Approx(rep.outcome.profit_a_gross - 0.03125));
  CHECK(rep.outcome.profit_b_net ==
        doctest::Approx(rep.outcome.profit_b_gross + 0.03125));
  CHECK(rep.outcome.profit_a_gross == doctest::Approx(0.171875).epsilon(1e-9));
  CHECK(rep.outcome.profit_b_gross == doctest::Approx(0.546875).epsilon(1e-9));

  CHECK(rep.pareto_flags.firms_ir);
  CHECK(rep.pareto_flags.all_consumers_weak);
  CHECK(rep.pareto_flags.some_consumer_strict);

  // interior shared consumers strictly gain; outsiders are untouched
  CHECK(rep.outcome.utility_of(0.3) > rep.baseline.utility_of(0.3) + 1e-9);
  CHECK(rep.outcome.utility_of(0.7) ==
        doctest::Approx(rep.baseline.utility_of(0.7)).epsilon(1e-10));
  CHECK(rep.outcome.utility_of(0.1) ==
        doctest::Approx(rep.baseline.utility_of(0.1)).epsilon(1e-10));

  CHECK_THROWS_AS(pareto_improving_mechanism(kUniform, kStd, 0.4), std::invalid_argument);
}

TEST_CASE("pareto-improving mechanism generalizes across parameters") {
  for (const auto& params : {MarketParams(3.0, 0.5), MarketParams(8.0, 2.0)}) {
    const auto [eq, base] = no_sharing_equilibrium(kUniform, params);
    const auto rep = pareto_improving_mechanism(kUniform, params, eq.selected);
    CHECK(rep.pareto_flags.firms_ir);
    CHECK(rep.pareto_flags.all_consumers_weak);
    CHECK(rep.pareto_flags.some_consumer_strict);
    REQUIRE(rep.ir_transfer_range.has_value());
    CHECK(rep.ir_transfer_range->first <= rep.ir_transfer_range->second);
  }
}

TEST_CASE("epsilon mechanism closed forms") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> draw(1e-3, 0.25);
  for (int i = 0; i < 20; ++i) {
    const double eps = draw(rng);
    const auto rep = epsilon_mechanism(kUniform, kStd, eps);
    CHECK(rep.uniform_a_cf == doctest::Approx(1.0 - 2 * eps));
    CHECK(rep.outcome.uniform_a == doctest::Approx(rep.uniform_a_cf).epsilon(1e-8));
    CHECK(rep.outcome.profit_a_gross == doctest::Approx(rep.profit_a_cf).epsilon(1e-8));
    CHECK(rep.outcome.profit_b_gross == doctest::Approx(rep.profit_b_cf).epsilon(1e-8));
    CHECK(rep.outcome.consumer_welfare ==
          doctest::Approx(rep.consumer_welfare_cf).epsilon(1e-8));
  }
  // small eps approaches the firm-optimal payoffs t/4 and 3t/4
  const auto tiny = epsilon_mechanism(kUniform, kStd, 1e-4);
  CHECK(tiny.profit_a_cf == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(tiny.profit_b_cf == doctest::Approx(0.75).epsilon(1e-3));
  CHECK(tiny.consumer_welfare_cf == doctest::Approx(3.0 - 1.25).epsilon(1e-3));

  CHECK_THROWS_AS(epsilon_mechanism(kUniform, kStd, 0.0), std::domain_error);
  CHECK_THROWS_AS(epsilon_mechanism(kUniform, kStd, 0.3), std::domain_error);
  CHECK_THROWS_AS(epsilon_mechanism(ConsumerDistribution::linear(1.0), kStd, 0.1),
                  std::invalid_argument);
}

TEST_CASE("ir transfer range arithmetic") {
  MarketOutcome base, with;
  base.profit_a_gross = 0.125;
  base.profit_b_gross = 0.5625;
  with.profit_a_gross = 0.171875;
  with.profit_b_gross = 0.546875;
  const auto r = ir_transfer_range(base, with);
  REQUIRE(r.has_value());
  CHECK(r->first == doctest::Approx(0.015625));
  CHECK(r->second == doctest::Approx(0.046875));

  with.profit_a_gross = 0.13;  // A gains too little to compensate B
  CHECK_FALSE(ir_transfer_range(base, with).has_value());
}

TEST_CASE("interval scan invariants") {
  const auto [eq, base] = no_sharing_equilibrium(kUniform, kStd);
  const auto entries = scan_interval_mechanisms(kUniform, kStd, base, 16);
  REQUIRE_FALSE(entries.empty());

  double best_profit = 0.0;
  for (const auto& e : entries) best_profit = std::max(best_profit, e.total_profit);
  // the scan contains [0, 1/2]; nothing on the lattice beats it
  CHECK(best_profit == doctest::Approx(kStd.v / 2 + 0.125).epsilon(1e-8));

  for (const auto& e : entries) {
    CHECK(e.lo <= e.hi);
    if (e.consumer_pareto) {
      // consumer-pareto mechanisms never shrink consumer welfare
      CHECK(e.consumer_welfare >= base.consumer_welfare - 1e-8);
    }
    // sharing only consumers in (1/2, 1] is payoff-irrelevant or harmful to B
    if (e.lo >= 0.5 + 1e-9) {
      CHECK(e.total_profit <=
            base.profit_a_gross + base.profit_b_gross + 1e-8);
    }
  }
}
