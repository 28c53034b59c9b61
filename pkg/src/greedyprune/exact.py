"""Exact solver for the diversity-constrained selection problem (small n).

``exact_solve`` is a depth-first branch-and-bound; the Lagrangian helpers
evaluate and brute-force the penalised (budget-free) form of the problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import Selection, as_weights, check_similarity_matrix
from .errors import DimensionMismatch, InstanceTooLarge
from .saliency import rank_tokens

DEFAULT_CAP = 24
ENUM_CAP = 20


@dataclass(frozen=True)
class ExactSolution:
    selection: Selection
    objective: float
    nodes_explored: int
    proven_optimal: bool


@dataclass(frozen=True)
class LagrangeMultipliers:
    """Non-negative multipliers, either one scalar for all pairs or a symmetric matrix."""

    values: object = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim not in (0, 2):
            raise DimensionMismatch("multipliers must be a scalar or a square matrix")
        if not np.isfinite(v).all() or (v < 0).any():
            raise ValueError("multipliers must be finite and non-negative")
        if v.ndim == 2 and (v.shape[0] != v.shape[1] or not np.array_equal(v, v.T)):
            raise ValueError("multiplier matrix must be square and symmetric")
        object.__setattr__(self, "values", v)

    def matrix(self, n: int) -> np.ndarray:
        if self.values.ndim == 0:
            return np.full((n, n), float(self.values))
        if self.values.shape[0] != n:
            raise DimensionMismatch(f"multiplier matrix is {self.values.shape}, expected ({n}, {n})")
        return self.values


def conflict_masks(sim: np.ndarray, tau: float) -> list[int]:
    """Bitmask per token of the tokens it may not be selected with."""
    over = sim > tau
    np.fill_diagonal(over, False)
    return [sum(1 << int(j) for j in np.flatnonzero(row)) for row in over]


def exact_solve(weights, sim, tau: float, budget: int, *, cap: int = DEFAULT_CAP, backend=None) -> ExactSolution:
    """Maximum-weight subset of at most ``budget`` tokens with all pairwise cosines <= ``tau``.

    Among equally good subsets the lexicographically smallest sorted index
    list wins. Raises InstanceTooLarge when ``n > cap``.
    """
    s = check_similarity_matrix(sim)
    n = s.shape[0]
    w = as_weights(weights, n)
    if n > cap:
        raise InstanceTooLarge(n, cap)
    if budget < 0:
        raise ValueError("budget must be non-negative")
    kern = _backend.kernels if backend is None else _backend.load(backend)
    if kern.MAX_BNB_N is not None and n > kern.MAX_BNB_N:
        kern = _backend.load("python")

    order = rank_tokens(w).order.tolist()
    positive = math.fsum(v for v in w if v > 0)
    tol = 1e-12 * max(1.0, positive)
    mask, _, nodes = kern.bnb_search(w, order, conflict_masks(s, tau), int(budget), tol)
    idx = tuple(i for i in range(n) if mask >> i & 1)
    sel = Selection(idx, int(budget))
    return ExactSolution(
        selection=sel,
        objective=math.fsum(w[i] for i in idx),
        nodes_explored=int(nodes),
        proven_optimal=True,
    )


def _as_binary(z, n: int) -> np.ndarray:
    zz = np.asarray(z)
    if zz.ndim != 1 or zz.shape[0] != n:
        raise DimensionMismatch(f"assignment has shape {zz.shape}, expected ({n},)")
    if not np.isin(zz, (0, 1)).all():
        raise ValueError("assignment entries must be 0 or 1")
    return zz.astype(np.int8)


def lagrangian_value(z, weights, sim, tau: float, lam) -> float:
    """Saliency of ``z`` minus the multiplier-weighted excess similarity of its pairs."""
    s = np.asarray(sim, dtype=np.float64)
    n = s.shape[0]
    w = as_weights(weights, n)
    zz = _as_binary(z, n)
    mult = lam if isinstance(lam, LagrangeMultipliers) else LagrangeMultipliers(lam)
    chosen = np.flatnonzero(zz).tolist()
    if mult.values.ndim == 0:
        scalar = float(mult.values)
        pair_lam = lambda i, j: scalar  # noqa: E731
    else:
        mat = mult.matrix(n)
        pair_lam = lambda i, j: float(mat[i, j])  # noqa: E731
    linear = math.fsum(w[i] for i in chosen)
    penalty = math.fsum(
        pair_lam(i, j) * (float(s[i, j]) - tau)
        for a, i in enumerate(chosen)
        for j in chosen[a + 1 :]
    )
    return linear - penalty


def lagrangian_brute_max(weights, sim, tau: float, lam, *, cap: int = ENUM_CAP):
    """Maximise the Lagrangian over all ``2**n`` binary assignments.

    Returns ``(z, value)``; ties go to the lexicographically smallest ``z``.
    """
    s = np.asarray(sim, dtype=np.float64)
    n = s.shape[0]
    w = as_weights(weights, n)
    if n > cap:
        raise InstanceTooLarge(n, cap)
    mult = lam if isinstance(lam, LagrangeMultipliers) else LagrangeMultipliers(lam)
    q = np.triu(mult.matrix(n) * (s - tau), 1)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    best_code, best_val = 0, -math.inf
    chunk = 1 << 16
    # code order with z[0] as the most significant bit is lexicographic order on z
    for lo in range(0, 1 << n, chunk):
        codes = np.arange(lo, min(lo + chunk, 1 << n), dtype=np.int64)
        zs = ((codes[:, None] >> shifts) & 1).astype(np.float64)
        vals = zs @ w - np.einsum("ij,ij->i", zs @ q, zs)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_code, best_val = int(codes[k]), float(vals[k])
    z = np.array([(best_code >> int(sh)) & 1 for sh in shifts], dtype=np.int8)
    return z, lagrangian_value(z, w, s, tau, mult)
