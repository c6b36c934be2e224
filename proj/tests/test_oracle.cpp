#include <doctest.h>

#include <cmath>
#include <random>

#include "datamarket/oracle.hpp"

using namespace datamarket;
using oracle::GridConfig;

namespace {
const MarketParams kStd(3.0, 1.0);
const ConsumerDistribution kUniform = ConsumerDistribution::uniform();
}  // namespace

TEST_CASE("consumer_point recovers the closed-form responses") {
  SUBCASE("unshared, interior uniform price") {
    const auto far = oracle::consumer_point(kStd, 0.5, false, 0.75);
    CHECK(far.firm == Firm::B);
    CHECK(far.price == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(far.utility == doctest::Approx(3.0 - 1.0 - 0.25).epsilon(1e-9));

    const auto near = oracle::consumer_point(kStd, 0.5, false, 0.1);
    CHECK(near.firm == Firm::A);
    CHECK(near.price == doctest::Approx(0.5));
  }
  SUBCASE("unshared, participation cap binds") {
    const auto pt = oracle::consumer_point(kStd, 2.5, false, 0.75);
    CHECK(pt.firm == Firm::B);
    CHECK(pt.price == doctest::Approx(2.75).epsilon(1e-8));
    CHECK(pt.utility == doctest::Approx(0.0).epsilon(1e-8));
  }
  SUBCASE("shared: personalized bertrand") {
    const auto a_side = oracle::consumer_point(kStd, 0.5, true, 0.3);
    CHECK(a_side.firm == Firm::A);
    CHECK(a_side.price == doctest::Approx(0.4).epsilon(1e-9));
    const auto b_side = oracle::consumer_point(kStd, 0.5, true, 0.7);
    CHECK(b_side.firm == Firm::B);
    CHECK(b_side.price == doctest::Approx(0.4).epsilon(1e-9));
    const auto tie = oracle::consumer_point(kStd, 0.5, true, 0.5);
    CHECK(tie.firm == Firm::B);
    CHECK(tie.price == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("oracle uniform price") {
  const GridConfig grid(512, 2048);
  const double step = kStd.v / 2048;
  CHECK(std::abs(oracle::oracle_uniform_price(kUniform, kStd, {}, grid) - 0.5) <=
        2 * step);
  // epsilon mechanism, eps = 0.1: p_A = t(1 - 2 eps) = 0.8
  CHECK(std::abs(oracle::oracle_uniform_price(kUniform, kStd,
                                              IntervalSet::interval(0.1, 0.5), grid) -
                 0.8) <= 2 * step);
  // degenerate objective: convention price v - t/2
  const MarketParams big(6.0, 1.0);
  CHECK(oracle::oracle_uniform_price(kUniform, big, IntervalSet::interval(0.0, 0.5),
                                     grid) == doctest::Approx(5.5));
}

TEST_CASE("oracle outcome matches the closed-form flagship numbers") {
  const GridConfig grid(2048, 2048);
  const auto out = oracle::oracle_outcome(kUniform, kStd, {}, 0.5, grid);
  CHECK(out.profit_a_gross == doctest::Approx(0.125).epsilon(1e-2));
  CHECK(out.profit_b_gross == doctest::Approx(0.5625).epsilon(1e-2));
  CHECK(out.consumer_welfare == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(out.utility_of(0.75) == doctest::Approx(3.0 - 1.0 - 0.25).epsilon(1e-6));

  const auto full =
      oracle::oracle_outcome(kUniform, kStd, {IntervalSet::full(), 0.0}, 5.5, grid);
  CHECK(full.profit_a_gross == doctest::Approx(0.25).epsilon(1e-2));
  CHECK(full.profit_b_gross == doctest::Approx(0.25).epsilon(1e-2));
}

TEST_CASE("oracle error halves with grid refinement") {
  const double exact = 0.5625;
  double prev_err = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int n = 256 << (2 * i);  // 256, 1024, 4096
    const auto out = oracle::oracle_outcome(kUniform, kStd, {}, 0.5, GridConfig(n, 64));
    const double err = std::abs(out.profit_b_gross - exact);
    if (i > 0) CHECK(err <= prev_err * 0.5 + 1e-12);
    prev_err = err;
  }
}

TEST_CASE("oracle vs closed-form equilibrium across mechanisms") {
  const GridConfig grid(1024, 1024);
  const std::vector<IntervalSet> shared_sets = {
      {},
      IntervalSet::interval(0.25, 0.375),
      IntervalSet::interval(0.1, 0.5),
      IntervalSet::from_pairs({{0.1, 0.2}, {0.6, 0.9}}),
  };
  for (const auto& s : shared_sets) {
    const Mechanism mech{s, 0.0};
    const auto fast = mechanism_equilibrium(kUniform, kStd, mech);
    const auto slow = oracle::oracle_outcome(kUniform, kStd, mech, fast.uniform_a, grid);
    CHECK(slow.profit_a_gross == doctest::Approx(fast.profit_a_gross).epsilon(1e-2));
    CHECK(slow.profit_b_gross == doctest::Approx(fast.profit_b_gross).epsilon(1e-2));
    CHECK(slow.consumer_welfare == doctest::Approx(fast.consumer_welfare).epsilon(1e-2));
  }
}

TEST_CASE("oracle price agrees with the solver for a linear density") {
  const auto linear = ConsumerDistribution::linear(1.0);
  const auto [eq, out] = no_sharing_equilibrium(linear, kStd);
  const GridConfig grid(2048, 4096);
  const double oracle_p = oracle::oracle_uniform_price(linear, kStd, {}, grid);
  CHECK(std::abs(oracle_p - eq.selected) < 1e-3);
  const auto slow = oracle::oracle_outcome(linear, kStd, {}, oracle_p, grid);
  CHECK(slow.profit_a_gross == doctest::Approx(out.profit_a_gross).epsilon(1e-2));
  CHECK(slow.profit_b_gross == doctest::Approx(out.profit_b_gross).epsilon(1e-2));
}

TEST_CASE("oracle best interval") {
  const GridConfig grid(256, 256);
  SUBCASE("unconstrained objective recovers [0, 1/2]") {
    const auto [best, value] = oracle::oracle_best_interval(
        kUniform, kStd, oracle::ScanObjective::total_profit, grid, 16);
    REQUIRE(best.intervals().size() == 1);
    CHECK(best.intervals()[0].first == doctest::Approx(0.0));
    CHECK(best.intervals()[0].second == doctest::Approx(0.5));
    CHECK(value == doctest::Approx(kStd.v / 2 + 0.125).epsilon(1e-2));
  }
  SUBCASE("pareto-constrained objective stays near the prop-3 mechanism") {
    const auto baseline = oracle::oracle_outcome(kUniform, kStd, {}, 0.5, grid);
    const auto [best, value] = oracle::oracle_best_interval(
        kUniform, kStd, oracle::ScanObjective::total_profit_pareto_constrained, grid, 16,
        &baseline);
    // nothing on the lattice beats the prop-3 total profit
    CHECK(value <= 0.171875 + 0.546875 + 1e-2);
    CHECK(value >= baseline.profit_a_gross + baseline.profit_b_gross - 1e-2);
  }
}
