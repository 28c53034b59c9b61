"""Diversity-constrained, saliency-maximising token subset selection.

The greedy pruner keeps the most salient tokens while dropping any token whose
cosine similarity to an already kept one exceeds a threshold. The package also
provides an exact branch-and-bound oracle for small instances, baseline
selectors, a TFLOPS-ratio cost model, a planted-instance generator, file
formats and a CLI.
"""
from ._backend import NAME as BACKEND
from .baselines import maxmin_diversity_select, random_select, topk_select, uniform_grid_select
from .core import (
    Selection,
    cosine,
    feasibility_violations,
    objective_value,
    pairwise_similarities,
    selection_violations,
)
from .cost import CostParams, layer_flops, tflops_ratio, tokens_for_ratio
from .exact import ExactSolution, LagrangeMultipliers, exact_solve, lagrangian_brute_max, lagrangian_value
from .greedy import GreedyTrace, PruneConfig, Termination, greedy_marginal_score, greedy_prune
from .saliency import RankedTokens, ablate_top_fraction, compute_saliency, rank_tokens
from .synth import PlantedInstance, generate_clustered, recall_of_planted

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CostParams",
    "ExactSolution",
    "GreedyTrace",
    "LagrangeMultipliers",
    "PlantedInstance",
    "PruneConfig",
    "RankedTokens",
    "Selection",
    "Termination",
    "ablate_top_fraction",
    "compute_saliency",
    "cosine",
    "exact_solve",
    "feasibility_violations",
    "generate_clustered",
    "greedy_marginal_score",
    "greedy_prune",
    "lagrangian_brute_max",
    "lagrangian_value",
    "layer_flops",
    "maxmin_diversity_select",
    "objective_value",
    "pairwise_similarities",
    "random_select",
    "rank_tokens",
    "recall_of_planted",
    "selection_violations",
    "tflops_ratio",
    "tokens_for_ratio",
    "topk_select",
    "uniform_grid_select",
]
