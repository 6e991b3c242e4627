"""Exact disjoint dynamics on the Cantor set and the interval, and on their Lipschitz-free spaces."""

from .cantor_free import L1Vector, conjugacy_residual, gap, operator_return_witness, s_sigma_apply
from .criterion import shift_powers_experiment, tent_powers_experiment, verify_criterion
from .free_space import FreeVector, delta, free_norm, linearize_apply, molecule
from .maps import compose, map_tuple, parse_map, sigma, tent, w, zigzag
from .metric_spaces import CANTOR, INTERVAL, CantorPoint, IntervalPoint
from .return_sets import check_disjoint_transitive, cylinder, disjoint_return_set, open_interval

__all__ = [
    "CANTOR", "INTERVAL", "CantorPoint", "IntervalPoint",
    "sigma", "w", "tent", "zigzag", "compose", "map_tuple", "parse_map",
    "cylinder", "open_interval", "disjoint_return_set", "check_disjoint_transitive",
    "FreeVector", "delta", "molecule", "free_norm", "linearize_apply",
    "L1Vector", "gap", "s_sigma_apply", "conjugacy_residual", "operator_return_witness",
    "verify_criterion", "shift_powers_experiment", "tent_powers_experiment",
]
