import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greedyprune import (
    LagrangeMultipliers,
    exact_solve,
    feasibility_violations,
    lagrangian_brute_max,
    lagrangian_value,
    objective_value,
    pairwise_similarities,
)
from greedyprune import _backend
from greedyprune.errors import DimensionMismatch, InstanceTooLarge

from conftest import random_instance
from oracles import brute_force_best, enumerate_best

THREE = np.array([[1.0, 0.95, 0.1], [0.95, 1.0, 0.1], [0.1, 0.1, 1.0]])
W3 = [0.9, 0.8, 0.5]


def test_three_token_example(backend):
    sol = exact_solve(W3, THREE, 0.9, 2, backend=backend)
    assert sol.selection.indices == (0, 2)
    assert sol.objective == math.fsum([0.9, 0.5])
    assert sol.proven_optimal
    assert brute_force_best(W3, THREE, 0.9, 2) == ([0, 2], sol.objective)


def test_vacuous_and_total_conflict(rng, backend):
    x, w = random_instance(rng, 12)
    sim = pairwise_similarities(x)
    sol = exact_solve(w, sim, 1.0, 4, backend=backend)
    top = sorted(np.argsort(-w, kind="stable")[:4].tolist())
    assert list(sol.selection.indices) == top
    assert sol.objective == math.fsum(w[top])
    full = np.full((5, 5), 0.99)
    np.fill_diagonal(full, 1.0)
    sol = exact_solve([0.1, 0.4, 0.4, 0.2, 0.0], full, 0.5, 3, backend=backend)
    assert sol.selection.indices == (1,)


def test_zero_budget_and_negative_weights(backend):
    sol = exact_solve(W3, THREE, 0.9, 0, backend=backend)
    assert sol.selection.indices == () and sol.objective == 0.0
    sol = exact_solve([-0.5, -0.1], np.eye(2), 0.5, 2, backend=backend)
    assert sol.selection.indices == ()


def test_tie_decided_on_rounded_total(backend):
    # 0.5 + 0.2 + 0.1 accumulates to 0.7999999999999999 but its correctly
    # rounded total is 0.8, tying with 0.5 + 0.3; the smaller index list wins
    w = [0.5, 0.2, 0.1, 0.3]
    sim = np.eye(4)
    sim[3, 1] = sim[1, 3] = sim[3, 2] = sim[2, 3] = 0.99
    sol = exact_solve(w, sim, 0.5, 3, backend=backend)
    assert sol.selection.indices == (0, 1, 2)
    assert sol.objective == 0.8
    assert enumerate_best(w, sim, 0.5, 3) == ([0, 1, 2], 0.8)


def test_cap(rng):
    x, w = random_instance(rng, 25)
    with pytest.raises(InstanceTooLarge):
        exact_solve(w, pairwise_similarities(x), 0.5, 3)
    sol = exact_solve(w[:5], pairwise_similarities(x[:5]), 0.5, 3, cap=5)
    assert sol.proven_optimal


@settings(max_examples=120, deadline=None)
@given(
    n=st.integers(1, 12),
    budget=st.integers(0, 13),
    tau=st.floats(-0.5, 1.0),
    seed=st.integers(0, 2**32 - 1),
    coarse=st.booleans(),
)
def test_matches_enumeration(n, budget, tau, seed, coarse):
    r = np.random.default_rng(seed)
    x = r.standard_normal((n, int(r.integers(1, 6))))
    w = r.uniform(-0.2, 1.0, n)
    if coarse:
        w = np.round(w, 1)  # many exact ties
    sim = pairwise_similarities(x)
    best, val = enumerate_best(w, sim, tau, budget)
    nodes = set()
    for be in _backend.available():
        sol = exact_solve(w, sim, tau, budget, backend=be)
        assert list(sol.selection.indices) == best
        assert sol.objective == val
        assert feasibility_violations(sim, sol.selection, tau) == []
        nodes.add(sol.nodes_explored)
    assert len(nodes) == 1


def test_enumeration_oracles_agree(rng):
    for _ in range(30):
        n = int(rng.integers(1, 9))
        x, w = random_instance(rng, n)
        w = np.round(w, 1)
        sim = pairwise_similarities(x)
        tau, m = float(rng.uniform(-0.2, 1)), int(rng.integers(1, n + 1))
        assert brute_force_best(w, sim, tau, m) == enumerate_best(w, sim, tau, m)


def test_monotone_in_tau_and_budget(rng):
    for _ in range(20):
        x, w = random_instance(rng, 12)
        sim = pairwise_similarities(x)
        taus = np.linspace(-0.5, 1.0, 7)
        vals = [exact_solve(w, sim, t, 4).objective for t in taus]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        vals = [exact_solve(w, sim, 0.3, m).objective for m in range(0, 13)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_lagrangian_examples():
    sim2 = np.array([[1.0, 0.95], [0.95, 1.0]])
    assert lagrangian_value([0, 0, 0], W3, THREE, 0.9, 10.0) == 0.0
    assert lagrangian_value([1, 0, 1], W3, THREE, 0.9, 0.0) == math.fsum([0.9, 0.5])
    expected = 1.7 - 10 * (0.95 - 0.9)
    assert lagrangian_value([1, 1], [0.9, 0.8], sim2, 0.9, 10.0) == pytest.approx(expected, abs=1e-12)
    assert lagrangian_value([1, 1], [0.9, 0.8], sim2, 0.9, LagrangeMultipliers(np.full((2, 2), 10.0))) == (
        pytest.approx(expected, abs=1e-12)
    )
    with pytest.raises(DimensionMismatch):
        lagrangian_value([1, 1], W3, THREE, 0.9, 0.0)
    with pytest.raises(ValueError):
        LagrangeMultipliers(-1.0)
    with pytest.raises(ValueError):
        LagrangeMultipliers(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_lagrangian_brute_max_examples():
    z, v = lagrangian_brute_max([0.5], np.eye(1), 0.3, 7.0)
    assert z.tolist() == [1] and v == 0.5
    z, _ = lagrangian_brute_max([0.3, -0.2, 0.0, 0.4], np.eye(4), 0.0, 0.0)
    # zero-weight token: excluding it gives the same value and a smaller z
    assert z.tolist() == [1, 0, 0, 1]
    # penalty 10 * 0.05 = 0.5 leaves {0, 1} at 1.2, above {0} alone at 0.9
    sim2 = np.array([[1.0, 0.95], [0.95, 1.0]])
    z, v = lagrangian_brute_max([0.9, 0.8], sim2, 0.9, 10.0)
    assert z.tolist() == [1, 1]
    assert v == pytest.approx(1.2, abs=1e-12)
    with pytest.raises(InstanceTooLarge):
        lagrangian_brute_max(np.ones(21), np.eye(21), 0.5, 0.0)


def _brute_lagrangian(w, sim, tau, lam):
    n = len(w)
    best = None
    for code in range(1 << n):
        z = [(code >> (n - 1 - i)) & 1 for i in range(n)]
        v = lagrangian_value(z, w, sim, tau, lam)
        if best is None or v > best[1]:
            best = (z, v)
    return best


def test_lagrangian_brute_max_vs_scalar_loop(rng):
    for _ in range(25):
        n = int(rng.integers(1, 8))
        x, w = random_instance(rng, n)
        w = w - 0.3
        sim = pairwise_similarities(x)
        lam = float(rng.uniform(0, 3))
        z, v = lagrangian_brute_max(w, sim, 0.2, lam)
        zb, vb = _brute_lagrangian(w, sim, 0.2, lam)
        assert v == pytest.approx(vb, abs=1e-12)
        if abs(v - vb) == 0:
            assert z.tolist() == zb


def test_zero_multiplier_equals_objective(rng):
    from greedyprune import Selection

    for _ in range(1000):
        n = int(rng.integers(1, 10))
        w = rng.standard_normal(n)
        z = rng.integers(0, 2, n)
        sim = np.eye(n)
        sel = Selection(tuple(np.flatnonzero(z).tolist()), n)
        assert lagrangian_value(z, w, sim, 0.5, 0.0) == objective_value(w, sel)
