"""Shared numeric types, cosine kernels and evaluators.

Token matrices, saliency vectors and similarity matrices are plain float64
numpy arrays; the ``as_*`` helpers validate and normalise inputs at operation
boundaries. :class:`Selection` is the one structured result type shared by
every selector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, NonFiniteInput, ZeroNormVector

if TYPE_CHECKING:
    from .greedy import GreedyTrace

# slack for SimilarityMatrix bounds checks
SIM_EPS = 1e-6


def as_token_matrix(tokens, *, nonzero: bool = True) -> np.ndarray:
    """Return ``tokens`` as a C-contiguous float64 ``(n, d)`` array.

    Raises DimensionMismatch for non-2-D input or ``d == 0``, NonFiniteInput
    for NaN/Inf entries and, when ``nonzero`` is set, ZeroNormVector naming
    the first all-zero row.
    """
    x = np.ascontiguousarray(tokens, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch(f"token matrix must be 2-D, got shape {x.shape}")
    if x.shape[1] < 1:
        raise DimensionMismatch("token matrix must have at least one column")
    if not np.isfinite(x).all():
        raise NonFiniteInput("token matrix contains non-finite values")
    if nonzero and x.shape[0]:
        zero = np.flatnonzero(~x.any(axis=1))
        if zero.size:
            raise ZeroNormVector(f"token row {int(zero[0])} has zero norm", row=int(zero[0]))
    return x


def as_weights(weights, n: Optional[int] = None) -> np.ndarray:
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.ndim != 1:
        raise DimensionMismatch(f"saliency vector must be 1-D, got shape {w.shape}")
    if n is not None and w.shape[0] != n:
        raise DimensionMismatch(f"saliency vector has length {w.shape[0]}, expected {n}")
    if not np.isfinite(w).all():
        raise NonFiniteInput("saliency vector contains non-finite values")
    return w


def row_sqnorms(x: np.ndarray) -> np.ndarray:
    """Squared Euclidean norm of every row, each reduced independently of the others."""
    return np.einsum("ij,ij->i", x, x)


def cosine(u, v) -> float:
    """Cosine similarity ``u.v / sqrt(|u|^2 |v|^2)`` clamped to [-1, 1].

    Taking one square root of the product makes ``cosine(u, u) == 1`` exact.
    """
    a = np.asarray(u, dtype=np.float64)
    b = np.asarray(v, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape or a.size == 0:
        raise DimensionMismatch(f"cannot take cosine of shapes {a.shape} and {b.shape}")
    na = float(np.dot(a, a))
    nb = float(np.dot(b, b))
    if na == 0.0 or nb == 0.0:
        raise ZeroNormVector("cosine of a zero-norm vector is undefined")
    c = float(np.dot(a, b)) / math.sqrt(na * nb)
    return min(1.0, max(-1.0, c))


def pairwise_similarities(tokens) -> np.ndarray:
    """Dense symmetric cosine-similarity matrix of the token rows.

    The upper triangle is computed once and mirrored, so the result is exactly
    symmetric; the diagonal is exactly 1.
    """
    x = as_token_matrix(tokens)
    n = x.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    sq = row_sqnorms(x)
    gram = x @ x.T
    sim = gram / np.sqrt(np.outer(sq, sq))
    np.clip(sim, -1.0, 1.0, out=sim)
    upper = np.triu(sim, 1)
    sim = upper + upper.T
    np.fill_diagonal(sim, 1.0)
    return sim


def check_similarity_matrix(sim) -> np.ndarray:
    s = np.asarray(sim, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"similarity matrix must be square, got shape {s.shape}")
    if not np.isfinite(s).all():
        raise NonFiniteInput("similarity matrix contains non-finite values")
    if not np.array_equal(s, s.T):
        raise ValueError("similarity matrix is not symmetric")
    if s.size and (s.min() < -1 - SIM_EPS or s.max() > 1 + SIM_EPS):
        raise ValueError("similarity matrix has entries outside [-1, 1]")
    return s


@dataclass(frozen=True)
class Selection:
    """Retained token indices in insertion order.

    ``backfilled`` counts trailing entries added after the diversity-respecting
    pivots ran out; :attr:`pivots` excludes them.
    """

    indices: tuple[int, ...]
    budget: int
    trace: Optional["GreedyTrace"] = field(default=None, compare=False)
    backfilled: int = 0

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if self.budget < 0:
            raise ValueError(f"budget must be non-negative, got {self.budget}")
        if len(idx) > self.budget:
            raise ValueError(f"{len(idx)} indices exceed budget {self.budget}")
        if len(set(idx)) != len(idx):
            raise ValueError("selection indices must be distinct")
        if any(i < 0 for i in idx):
            raise IndexOutOfRange("selection indices must be non-negative")
        if not 0 <= self.backfilled <= len(idx):
            raise ValueError("backfilled count out of range")

    def __len__(self):
        return len(self.indices)

    @property
    def pivots(self) -> tuple[int, ...]:
        return self.indices[: len(self.indices) - self.backfilled]

    def as_mask(self, n: int) -> np.ndarray:
        check_indices(self.indices, n)
        z = np.zeros(n, dtype=np.int8)
        z[list(self.indices)] = 1
        return z


def check_indices(indices: Sequence[int], n: int) -> None:
    for i in indices:
        if not 0 <= i < n:
            raise IndexOutOfRange(f"index {i} outside [0, {n})")


def objective_value(weights, sel: Selection) -> float:
    """Total saliency of the selected tokens (correctly rounded sum)."""
    w = as_weights(weights)
    check_indices(sel.indices, w.shape[0])
    return math.fsum(w[i] for i in sel.indices)


def feasibility_violations(sim, sel: Selection, tau: float, *, atol: float = 0.0):
    """All selected pairs ``(i, j, cos)`` with ``i < j`` and ``cos > tau + atol``.

    An empty list means the selection satisfies the diversity constraint.
    """
    s = np.asarray(sim, dtype=np.float64)
    check_indices(sel.indices, s.shape[0])
    idx = sorted(sel.indices)
    limit = tau + atol
    out = []
    for a, i in enumerate(idx):
        for j in idx[a + 1 :]:
            c = float(s[i, j])
            if c > limit:
                out.append((i, j, c))
    return out


def selection_violations(tokens, indices: Sequence[int], tau: float, *, atol: float = 0.0):
    """Like :func:`feasibility_violations` but only builds the similarities it needs."""
    x = as_token_matrix(tokens)
    check_indices(indices, x.shape[0])
    idx = sorted(int(i) for i in indices)
    if len(idx) < 2:
        return []
    sub = pairwise_similarities(x[idx])
    local = Selection(tuple(range(len(idx))), len(idx))
    return [(idx[a], idx[b], c) for a, b, c in feasibility_violations(sub, local, tau, atol=atol)]
