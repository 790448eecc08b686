"""Greedy bi-criteria clustering for generalized k-medians and k-means."""

from .cost import NearestCache, add_center, assign, build_cache, candidate_cost, candidate_costs, cost, normalized_cost
from .diagnostics import (
    RecurrenceReport,
    ReferenceSolution,
    audit_run,
    check_condition1,
    check_condition2,
    core_set,
    kappa_core,
    kappa_lb,
)
from .greedy import GreedyConfig, GreedyTrace, pick_candidate, run_greedy
from .metric import PointSpace, delta, distance, norm_ball_sample, validate_finite_metric
from .oracle import brute_force_kmeans, brute_force_medoids, brute_force_two_means, inaba_search
from .selectors import (
    SelectorSpec,
    guess_ball,
    kmeanspp_seed,
    make_selector,
    select_all,
    select_ball,
    select_pp,
    select_sgd,
    select_uniform,
    subset_means,
)

__version__ = "0.1.0"

__all__ = [
    "GreedyConfig",
    "GreedyTrace",
    "NearestCache",
    "PointSpace",
    "RecurrenceReport",
    "ReferenceSolution",
    "SelectorSpec",
    "add_center",
    "assign",
    "audit_run",
    "brute_force_kmeans",
    "brute_force_medoids",
    "brute_force_two_means",
    "build_cache",
    "candidate_cost",
    "candidate_costs",
    "check_condition1",
    "check_condition2",
    "core_set",
    "cost",
    "delta",
    "distance",
    "guess_ball",
    "inaba_search",
    "kappa_core",
    "kappa_lb",
    "kmeanspp_seed",
    "make_selector",
    "norm_ball_sample",
    "normalized_cost",
    "pick_candidate",
    "run_greedy",
    "select_all",
    "select_ball",
    "select_pp",
    "select_sgd",
    "select_uniform",
    "subset_means",
    "validate_finite_metric",
]
