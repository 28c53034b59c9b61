"""Greedy pruning: pivot extraction with threshold-based redundancy removal."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import Selection, as_token_matrix, as_weights, row_sqnorms
from .errors import DimensionMismatch, EmptyInput
from .saliency import rank_tokens


class Termination(enum.Enum):
    BUDGET_REACHED = "BudgetReached"
    CANDIDATES_EXHAUSTED = "CandidatesExhausted"


@dataclass(frozen=True)
class PruneConfig:
    budget: int
    tau: float = 0.9
    backfill: bool = True
    lambda_uniform: float = 1.0

    def __post_init__(self):
        if int(self.budget) != self.budget or self.budget < 1:
            raise ValueError(f"budget must be a positive integer, got {self.budget!r}")
        if not math.isfinite(self.tau):
            raise ValueError(f"tau must be finite, got {self.tau!r}")
        if not (self.lambda_uniform >= 0 and math.isfinite(self.lambda_uniform)):
            raise ValueError("lambda_uniform must be finite and non-negative")


@dataclass(frozen=True)
class GreedyTrace:
    """Per-step record: ``steps[s] = (pivot, eliminated)``.

    ``eliminated`` lists the tokens removed as redundant with that pivot, in
    descending saliency order. ``leftover`` holds candidates that were never
    picked nor eliminated (only non-empty when the budget was reached).
    """

    steps: tuple[tuple[int, tuple[int, ...]], ...]
    terminated_by: Termination
    leftover: tuple[int, ...] = ()

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.steps)

    @property
    def eliminated(self) -> tuple[int, ...]:
        return tuple(i for _, red in self.steps for i in red)


def greedy_prune(tokens, weights, cfg: PruneConfig, *, backend: str | None = None):
    """Select up to ``cfg.budget`` salient, mutually dissimilar tokens.

    Candidates are visited in descending saliency (ties by index). Each step
    takes the best remaining candidate as pivot and drops every remaining
    candidate whose cosine with it is strictly greater than ``cfg.tau``. When
    candidates run out before the budget and ``cfg.backfill`` is set, the
    highest-saliency eliminated tokens top the selection up.

    Returns:
        ``(selection, trace)``; ``selection.trace`` is the same trace object.
    """
    x = as_token_matrix(tokens)
    n = x.shape[0]
    if n == 0:
        raise EmptyInput("greedy_prune needs at least one token")
    w = as_weights(weights)
    if w.shape[0] != n:
        raise DimensionMismatch(f"{w.shape[0]} weights for {n} tokens")
    kern = _backend.kernels if backend is None else _backend.load(backend)

    order = rank_tokens(w).order
    pivots, status = kern.greedy_scan(x, row_sqnorms(x), order, float(cfg.tau), int(cfg.budget))

    st = status[order]
    elim_mask = st >= 0
    elim_tokens = order[elim_mask]
    elim_step = st[elim_mask]
    grouped = np.argsort(elim_step, kind="stable")
    counts = np.bincount(elim_step, minlength=len(pivots)) if elim_step.size else np.zeros(len(pivots), int)
    bounds = np.concatenate(([0], np.cumsum(counts)))
    sorted_tokens = elim_tokens[grouped].tolist()
    steps = tuple(
        (int(p), tuple(sorted_tokens[bounds[s] : bounds[s + 1]])) for s, p in enumerate(pivots)
    )
    leftover = tuple(order[st == kern.LEFTOVER].tolist())
    done = len(pivots) == cfg.budget
    trace = GreedyTrace(
        steps=steps,
        terminated_by=Termination.BUDGET_REACHED if done else Termination.CANDIDATES_EXHAUSTED,
        leftover=leftover,
    )

    indices = [int(p) for p in pivots]
    backfilled = 0
    if not done and cfg.backfill:
        # elim_tokens is already in descending saliency order
        extra = elim_tokens[: cfg.budget - len(indices)].tolist()
        indices.extend(extra)
        backfilled = len(extra)
    sel = Selection(tuple(indices), int(cfg.budget), trace=trace, backfilled=backfilled)
    return sel, trace


def greedy_marginal_score(weight_i: float, cos_to_selected: float, tau: float, lam: float = 1.0) -> float:
    """Penalised score ``w - lam * (cos - tau)`` relating a greedy step to the Lagrangian."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    return weight_i - lam * (cos_to_selected - tau)
