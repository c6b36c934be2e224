import math

import pytest

import datamarket as dm


def test_version():
    assert dm.__version__


def test_mu():
    assert dm.mu(0.5, 3.0, 1.0) == pytest.approx(0.25)


def test_no_sharing_benchmark():
    eq = dm.no_sharing_equilibrium(3.0, 1.0)
    assert eq["p_a"] == pytest.approx(0.5, abs=1e-9)
    assert eq["profit_a_gross"] == pytest.approx(0.125, abs=1e-8)
    assert eq["profit_b_gross"] == pytest.approx(0.5625, abs=1e-8)
    assert eq["consumer_welfare"] == pytest.approx(2.0, abs=1e-8)
    assert eq["utility_of"](0.0) == pytest.approx(2.5, abs=1e-9)


def test_direct_effect_cases():
    case2 = dm.direct_effect(0.3, 0.5, 3.0, 1.0)
    assert case2["case"] == 2
    assert case2["delta_profit_a"] == pytest.approx(0.4)
    assert case2["net_gain_positive"]


def test_mechanism_equilibrium_full_sharing():
    out = dm.mechanism_equilibrium([(0.0, 1.0)], v=3.0, t=1.0)
    assert out["profit_a_gross"] == pytest.approx(0.25, abs=1e-8)
    assert out["profit_b_gross"] == pytest.approx(0.25, abs=1e-8)
    assert out["uniform_price_unused"]


def test_pareto_report():
    rep = dm.pareto_improving_mechanism(3.0, 1.0, "uniform", 0.5)
    assert rep["shared"][0] == pytest.approx((0.25, 0.375))
    lo, hi = rep["ir_transfer_range"]
    assert lo == pytest.approx(0.015625, abs=1e-9)
    assert hi == pytest.approx(0.046875, abs=1e-9)
    assert rep["firms_ir"] and rep["all_consumers_weak"] and rep["some_consumer_strict"]


def test_firm_optimal_condition_flag():
    assert dm.firm_optimal_mechanism(6.0, 1.0)["condition_holds"]
    assert not dm.firm_optimal_mechanism(3.0, 1.0)["condition_holds"]


def test_epsilon_closed_forms():
    rep = dm.epsilon_mechanism(0.1, 3.0, 1.0)
    assert rep["closed_form"]["p_a"] == pytest.approx(0.8)
    assert rep["outcome"]["profit_a_gross"] == pytest.approx(0.24, abs=1e-8)


def test_oracle_agrees_with_solver():
    p = dm.oracle_uniform_price([], 3.0, 1.0, n_theta=256, n_price=1024)
    assert abs(p - 0.5) <= 2 * 3.0 / 1024
    slow = dm.oracle_outcome([], 0.5, n_theta=512)
    assert slow["profit_b_gross"] == pytest.approx(0.5625, abs=1e-2)


def test_tfne_and_scan():
    verdict = dm.verify_prop4_tfne(3.0, 1.0, 0.5, 0.375)
    assert verdict["holds"]
    scan = dm.consumer_optimal_scan(3.0, 1.0, 0.5, n_lattice=8)
    assert scan["counterexample_count"] == 0


def test_invalid_arguments_raise():
    with pytest.raises(ValueError):
        dm.no_sharing_equilibrium(1.0, 1.0)  # violates v > 2t
    with pytest.raises(ValueError):
        dm.epsilon_mechanism(0.4)
