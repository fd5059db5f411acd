"""Exact and sampled distance to halfspaces, k-SUM hardness gadgets, and SQ simulations."""

from .estimator import DatasetAccess, approx_distance, sample_size
from .exact import (
    DistanceReport,
    Method,
    exact_distance,
    exact_distance_1d,
    exact_distance_2d,
    exact_distance_cand,
    exact_distance_sep,
)
from .geometry import Halfspace, LabeledDataset, disagreement, eval_halfspace
from .ksum import KSumInstance, KSumWitness, gen_instance, solve_brute, solve_mitm
from .reduction import GapViolation, ReducedInstance, Side, build_reduction, decide_via_distance, verify_gap
from .simplex import is_separable

__all__ = [
    "DatasetAccess",
    "DistanceReport",
    "GapViolation",
    "Halfspace",
    "KSumInstance",
    "KSumWitness",
    "LabeledDataset",
    "Method",
    "ReducedInstance",
    "Side",
    "approx_distance",
    "build_reduction",
    "decide_via_distance",
    "disagreement",
    "eval_halfspace",
    "exact_distance",
    "exact_distance_1d",
    "exact_distance_2d",
    "exact_distance_cand",
    "exact_distance_sep",
    "gen_instance",
    "is_separable",
    "sample_size",
    "solve_brute",
    "solve_mitm",
    "verify_gap",
]
