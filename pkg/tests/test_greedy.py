import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greedyprune import (
    PruneConfig,
    Termination,
    exact_solve,
    greedy_marginal_score,
    greedy_prune,
    pairwise_similarities,
    rank_tokens,
    selection_violations,
)
from greedyprune.errors import DimensionMismatch, EmptyInput

from conftest import gram_tokens, random_instance
from oracles import naive_greedy

THREE = [[1.0, 0.95, 0.1], [0.95, 1.0, 0.1], [0.1, 0.1, 1.0]]


def test_three_token_example(backend):
    x = gram_tokens(THREE)
    sel, trace = greedy_prune(x, [0.9, 0.8, 0.5], PruneConfig(2, 0.9), backend=backend)
    assert sel.indices == (0, 2)
    assert trace.steps[0] == (0, (1,))
    assert trace.terminated_by is Termination.BUDGET_REACHED
    assert sel.backfilled == 0


def test_vacuous_threshold_is_rank_prefix(rng, backend):
    x, w = random_instance(rng, 40)
    for tau in (1.0, 1.5):
        sel, trace = greedy_prune(x, w, PruneConfig(7, tau), backend=backend)
        assert list(sel.indices) == rank_tokens(w).order[:7].tolist()
        assert trace.eliminated == ()


def test_budget_one_picks_argmax_lowest_index(backend):
    x = np.eye(4)
    sel, trace = greedy_prune(x, [0.3, 0.7, 0.7, 0.1], PruneConfig(1), backend=backend)
    assert sel.indices == (1,)
    assert len(trace.steps) == 1


def test_grid_scale_budget_feasible(rng, backend):
    x = rng.standard_normal((576, 64))
    w = rng.random(576)
    sel, _ = greedy_prune(x, w, PruneConfig(64, 0.3), backend=backend)
    assert len(sel) <= 64
    assert selection_violations(x, sel.pivots, 0.3, atol=1e-9) == []


def test_equality_at_threshold_survives(backend):
    # 15 / sqrt(25 * 25) is exactly 0.6
    x = np.array([[5.0, 0.0], [3.0, 4.0]])
    tau = 0.6
    sel, _ = greedy_prune(x, [1.0, 0.5], PruneConfig(2, tau, backfill=False), backend=backend)
    assert sel.indices == (0, 1)
    sel, _ = greedy_prune(x, [1.0, 0.5], PruneConfig(2, 0.59, backfill=False), backend=backend)
    assert sel.indices == (0,)


def test_single_cluster_collapse_and_backfill(rng, backend):
    base = rng.standard_normal(8)
    x = base + 1e-3 * rng.standard_normal((10, 8))
    w = rng.random(10)
    sel, trace = greedy_prune(x, w, PruneConfig(4, 0.5, backfill=False), backend=backend)
    assert sel.indices == (int(np.argmax(w)),)
    assert trace.terminated_by is Termination.CANDIDATES_EXHAUSTED
    full, _ = greedy_prune(x, w, PruneConfig(4, 0.5), backend=backend)
    assert list(full.indices) == rank_tokens(w).order[:4].tolist()
    assert full.backfilled == 3
    assert full.pivots == sel.indices


def test_errors():
    with pytest.raises(EmptyInput):
        greedy_prune(np.zeros((0, 3)), [], PruneConfig(1))
    with pytest.raises(DimensionMismatch):
        greedy_prune(np.eye(3), [1.0, 2.0], PruneConfig(1))
    with pytest.raises(ValueError):
        PruneConfig(0)
    with pytest.raises(ValueError):
        PruneConfig(2, float("nan"))


def test_marginal_score_examples():
    assert greedy_marginal_score(0.8, 0.5, 0.5, 10.0) == 0.8
    assert greedy_marginal_score(0.8, 0.9, 0.5, 1.0) == pytest.approx(0.4, abs=1e-15)
    assert greedy_marginal_score(0.8, 0.99, 0.1, 0.0) == 0.8
    with pytest.raises(ValueError):
        greedy_marginal_score(0.8, 0.9, 0.5, -1.0)


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(1, 40),
    d=st.integers(1, 6),
    budget=st.integers(1, 45),
    tau=st.floats(-0.2, 1.0),
    backfill=st.booleans(),
    seed=st.integers(0, 2**32 - 1),
)
def test_matches_literal_pivot_loop(n, d, budget, tau, backfill, seed):
    r = np.random.default_rng(seed)
    x = r.standard_normal((n, d))
    w = np.round(r.random(n), 2)  # coarse weights force index tie-breaks
    chosen, pivots, steps, rest = naive_greedy(x, w, tau, budget, backfill)
    for be in _backends():
        sel, trace = greedy_prune(x, w, PruneConfig(budget, tau, backfill), backend=be)
        assert list(sel.indices) == chosen
        assert list(trace.pivots) == pivots
        assert list(trace.steps) == steps
        assert list(trace.leftover) == rest
        covered = set(trace.pivots) | set(trace.eliminated) | set(trace.leftover)
        assert covered == set(range(n))
        assert len(covered) == len(trace.pivots) + len(trace.eliminated) + len(trace.leftover)
        if backfill and n >= budget:
            assert len(sel) == budget


def _backends():
    from greedyprune import _backend

    return _backend.available()


def test_greedy_dominated_by_exact_and_planted_cluster_rule(rng):
    for _ in range(40):
        n = int(rng.integers(2, 12))
        x, w = random_instance(rng, n)
        tau = float(rng.uniform(-0.3, 1.0))
        m = int(rng.integers(1, n + 1))
        sel, _ = greedy_prune(x, w, PruneConfig(m, tau, backfill=False))
        opt = exact_solve(w, pairwise_similarities(x), tau, m)
        assert float(np.sum(w[list(sel.indices)])) <= opt.objective + 1e-12


def test_deterministic_repeat(rng, backend):
    x, w = random_instance(rng, 200, 16)
    a = greedy_prune(x, w, PruneConfig(30, 0.2), backend=backend)
    b = greedy_prune(x, w, PruneConfig(30, 0.2), backend=backend)
    assert a[0] == b[0] and a[1] == b[1]
