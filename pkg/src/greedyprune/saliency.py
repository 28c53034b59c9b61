"""Query-conditioned token saliency and ranking."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Selection, as_token_matrix, as_weights, row_sqnorms
from .errors import DimensionMismatch, ZeroNormVector


@dataclass(frozen=True)
class RankedTokens:
    order: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        order = self.order
        if sorted(order.tolist()) != list(range(len(self.weights))):
            raise ValueError("order is not a permutation of the token indices")


def compute_saliency(visual, query) -> np.ndarray:
    """Cosine similarity of every visual token to the query vector.

    Args:
        visual: ``(n, d)`` token embeddings, no zero rows.
        query: length-``d`` vector (e.g. the hidden state of the last text token).

    Returns:
        Length-``n`` float64 array with values in [-1, 1].
    """
    x = as_token_matrix(visual)
    q = np.ascontiguousarray(query, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"query has shape {q.shape}, expected ({x.shape[1]},)")
    qn = float(np.dot(q, q))
    if qn == 0.0:
        raise ZeroNormVector("query vector has zero norm")
    dots = np.einsum("ij,j->i", x, q)
    w = dots / np.sqrt(row_sqnorms(x) * qn)
    return np.clip(w, -1.0, 1.0)


def rank_tokens(weights) -> RankedTokens:
    """Descending-saliency order; equal weights keep ascending index order."""
    w = as_weights(weights)
    # stable sort on the negated key keeps ties in index order
    order = np.argsort(-w, kind="stable").astype(np.intp)
    return RankedTokens(order=order, weights=w)


def ablate_top_fraction(weights, fraction: float) -> Selection:
    """The ``floor(fraction * n)`` most salient tokens, i.e. the ones to remove."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    ranked = rank_tokens(weights)
    n = len(ranked.order)
    k = math.floor(fraction * n)
    return Selection(tuple(ranked.order[:k].tolist()), k)
