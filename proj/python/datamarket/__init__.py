"""Hotelling data-sharing market analyzer."""

from ._core import (
    __version__,
    consumer_optimal_scan,
    direct_effect,
    epsilon_mechanism,
    firm_optimal_mechanism,
    full_sharing_report,
    mechanism_equilibrium,
    mu,
    no_sharing_equilibrium,
    oracle_outcome,
    oracle_uniform_price,
    pareto_improving_mechanism,
    verify_prop4_tfne,
)

__all__ = [
    "__version__",
    "consumer_optimal_scan",
    "direct_effect",
    "epsilon_mechanism",
    "firm_optimal_mechanism",
    "full_sharing_report",
    "mechanism_equilibrium",
    "mu",
    "no_sharing_equilibrium",
    "oracle_outcome",
    "oracle_uniform_price",
    "pareto_improving_mechanism",
    "verify_prop4_tfne",
]
