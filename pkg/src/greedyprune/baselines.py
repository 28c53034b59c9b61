"""Comparison selectors: saliency-only, diversity-only, random and spatial grid.

These are behavioural stand-ins for the families of methods the greedy
pruner is compared against, not reproductions of any specific published
method. Reports label them ``topk``, ``maxmin``, ``random`` and ``grid``.
"""
from __future__ import annotations

import numpy as np

from .core import Selection, as_token_matrix, row_sqnorms
from .errors import BudgetExceedsN, EmptyInput, GridMismatch
from .saliency import rank_tokens

SEED_RULES = ("lowest", "max_norm")


def topk_select(weights, budget: int) -> Selection:
    """The ``budget`` most salient tokens (ties by index); all tokens if budget >= n."""
    order = rank_tokens(weights).order
    if len(order) == 0:
        raise EmptyInput("topk_select needs at least one token")
    return Selection(tuple(order[:budget].tolist()), budget)


def maxmin_diversity_select(tokens, budget: int, seed_rule: str = "lowest") -> Selection:
    """Farthest-point selection under the distance ``1 - cos``.

    Starts from the lowest-index row (``seed_rule="lowest"``) or the row with
    the largest norm (``"max_norm"``), then repeatedly adds the unselected
    token whose minimum distance to the selection is largest. Ties go to the
    lowest index. Saliency plays no part.
    """
    x = as_token_matrix(tokens)
    n = x.shape[0]
    if n == 0:
        raise EmptyInput("maxmin_diversity_select needs at least one token")
    if seed_rule not in SEED_RULES:
        raise ValueError(f"seed_rule must be one of {SEED_RULES}, got {seed_rule!r}")
    m = min(budget, n)
    if m <= 0:
        return Selection((), budget)
    norms = np.sqrt(row_sqnorms(x))
    unit = x / norms[:, None]
    first = 0 if seed_rule == "lowest" else int(np.argmax(norms))
    chosen = [first]
    taken = np.zeros(n, dtype=bool)
    taken[first] = True
    mind = 1.0 - np.clip(unit @ unit[first], -1.0, 1.0)
    while len(chosen) < m:
        score = np.where(taken, -np.inf, mind)
        nxt = int(np.argmax(score))
        chosen.append(nxt)
        taken[nxt] = True
        np.minimum(mind, 1.0 - np.clip(unit @ unit[nxt], -1.0, 1.0), out=mind)
    return Selection(tuple(chosen), budget)


_U64 = (1 << 64) - 1


def _bounded(gen: np.random.PCG64, bound: int) -> int:
    """Uniform integer in [0, bound) from raw 64-bit draws (rejection sampling)."""
    limit = (1 << 64) - ((1 << 64) % bound)
    while True:
        r = int(gen.random_raw())
        if r < limit:
            return r % bound


def random_select(n: int, budget: int, seed: int) -> Selection:
    """Uniform sample of ``budget`` distinct indices, reproducible from ``seed``.

    Uses a partial Fisher-Yates shuffle driven by the raw 64-bit output of
    the PCG64 generator, whose stream numpy keeps stable across versions
    and platforms.
    """
    if budget > n:
        raise BudgetExceedsN(f"budget {budget} exceeds n={n}")
    if budget < 0:
        raise ValueError("budget must be non-negative")
    gen = np.random.PCG64(seed & _U64)
    pool = list(range(n))
    for k in range(budget):
        j = k + _bounded(gen, n - k)
        pool[k], pool[j] = pool[j], pool[k]
    return Selection(tuple(pool[:budget]), budget)


def uniform_grid_select(grid_w: int, grid_h: int, budget: int, n: int | None = None) -> Selection:
    """Evenly strided positions ``floor(k * n / budget)`` in row-major order."""
    total = grid_w * grid_h
    if grid_w < 1 or grid_h < 1 or (n is not None and n != total):
        raise GridMismatch(f"grid {grid_w}x{grid_h} does not cover {n} tokens")
    if budget > total:
        raise BudgetExceedsN(f"budget {budget} exceeds n={total}")
    if budget < 0:
        raise ValueError("budget must be non-negative")
    return Selection(tuple(k * total // budget for k in range(budget)), budget)
