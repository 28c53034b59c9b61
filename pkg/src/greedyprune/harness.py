"""Method dispatch, comparison tables and threshold sweeps used by the CLI."""
from __future__ import annotations

import csv
import io as _stdio
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .baselines import maxmin_diversity_select, random_select, topk_select, uniform_grid_select
from .core import Selection, objective_value, pairwise_similarities, selection_violations
from .errors import ConfigError
from .exact import DEFAULT_CAP, exact_solve
from .greedy import PruneConfig, greedy_prune
from .io import SelectionRecord
from .synth import PlantedInstance, recall_of_planted

METHODS = ("greedy", "topk", "maxmin", "random", "grid", "exact")
# artifact default; configurable per run
DEFAULT_TAU = 0.9
# tolerance when counting constraint violations of a finished selection
VIOLATION_ATOL = 1e-9


@dataclass(frozen=True)
class RunConfig:
    method: str
    budget: int
    tau: float = DEFAULT_TAU
    backfill: bool = True
    seed: int = 0
    grid: Optional[tuple[int, int]] = None
    cap: int = DEFAULT_CAP
    seed_rule: str = "lowest"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"--method must be one of {', '.join(METHODS)}; got {self.method!r}")
        if self.budget < 1:
            raise ConfigError(f"--budget must be a positive integer; got {self.budget}")
        if not math.isfinite(self.tau):
            raise ConfigError("--tau must be finite")
        if self.method == "grid" and self.grid is None:
            raise ConfigError("--grid WxH is required for method 'grid'")

    def check_n(self, n: int) -> None:
        if self.grid is not None and self.grid[0] * self.grid[1] != n:
            raise ConfigError(f"--grid {self.grid[0]}x{self.grid[1]} does not match n={n} tokens")
        if self.method == "random" and self.budget > n:
            raise ConfigError(f"--budget {self.budget} exceeds n={n} for method 'random'")


def run_method(cfg: RunConfig, tokens: np.ndarray, weights: np.ndarray) -> tuple[Selection, int]:
    """Run one selector; returns the selection and its wall time in microseconds."""
    n = tokens.shape[0]
    cfg.check_n(n)
    t0 = time.perf_counter()
    if cfg.method == "greedy":
        sel, _ = greedy_prune(tokens, weights, PruneConfig(cfg.budget, cfg.tau, cfg.backfill))
    elif cfg.method == "topk":
        sel = topk_select(weights, cfg.budget)
    elif cfg.method == "maxmin":
        sel = maxmin_diversity_select(tokens, cfg.budget, cfg.seed_rule)
    elif cfg.method == "random":
        sel = random_select(n, cfg.budget, cfg.seed)
    elif cfg.method == "grid":
        sel = uniform_grid_select(cfg.grid[0], cfg.grid[1], min(cfg.budget, n), n)
    else:
        sel = exact_solve(weights, pairwise_similarities(tokens), cfg.tau, cfg.budget, cap=cfg.cap).selection
    elapsed = int(round((time.perf_counter() - t0) * 1e6))
    return sel, elapsed


def make_record(cfg: RunConfig, sel: Selection, tokens, weights, checksum: str, runtime_us: int) -> SelectionRecord:
    """Summarise a selection; violations are counted among non-backfilled tokens."""
    viol = selection_violations(tokens, sel.pivots, cfg.tau, atol=VIOLATION_ATOL)
    return SelectionRecord(
        method=cfg.method,
        budget=cfg.budget,
        tau=cfg.tau,
        indices=list(sel.indices),
        backfilled=sel.backfilled,
        backfilled_indices=list(sel.indices[len(sel.indices) - sel.backfilled :]),
        objective=objective_value(weights, sel),
        feasibility_violation_count=len(viol),
        runtime_microseconds=runtime_us,
        input_checksum=checksum,
    )


def _pair_stats(tokens, indices):
    """(max, mean) cosine over selected pairs, NaN when fewer than two tokens."""
    idx = sorted(indices)
    if len(idx) < 2:
        return math.nan, math.nan
    sim = pairwise_similarities(tokens[idx])
    upper = sim[np.triu_indices(len(idx), 1)]
    return float(upper.max()), float(upper.mean())


@dataclass
class Table:
    columns: list[str]
    rows: list[list]

    def _fmt(self, v) -> str:
        if v is None:
            return "-"
        if isinstance(v, float):
            return "nan" if math.isnan(v) else f"{v:.6f}"
        return str(v)

    def to_text(self) -> str:
        cells = [self.columns] + [[self._fmt(v) for v in r] for r in self.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.columns))]
        lines = ["  ".join(c.rjust(w) if k else c.ljust(w) for k, (c, w) in enumerate(zip(r, widths))) for r in cells]
        return "\n".join(line.rstrip() for line in lines) + "\n"

    def to_csv(self) -> str:
        buf = _stdio.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(self.columns)
        for r in self.rows:
            out.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_text()


def compare_methods(
    tokens,
    weights,
    methods: Sequence[str],
    budget: int,
    tau: float = DEFAULT_TAU,
    *,
    seed: int = 0,
    grid=None,
    planted: Optional[PlantedInstance] = None,
    cap: int = DEFAULT_CAP,
    timing: bool = True,
) -> Table:
    """One row per method at a shared budget; the gap column needs ``n <= cap``.

    The gap compares the optimum with the objective of the non-backfilled
    part of each selection, since backfilled tokens may break the constraint.
    """
    n = tokens.shape[0]
    optimum = None
    if n <= cap:
        optimum = exact_solve(weights, pairwise_similarities(tokens), tau, budget, cap=cap).objective
    rows = []
    for m in methods:
        cfg = RunConfig(method=m, budget=budget, tau=tau, seed=seed, grid=grid, cap=cap)
        sel, us = run_method(cfg, tokens, weights)
        obj = objective_value(weights, sel)
        max_cos, _ = _pair_stats(tokens, sel.indices)
        viol = len(selection_violations(tokens, sel.pivots, tau, atol=VIOLATION_ATOL))
        rows.append(
            [
                m,
                len(sel),
                obj,
                1.0 - max_cos,
                viol,
                None if planted is None else recall_of_planted(sel, planted),
                None if optimum is None else optimum - objective_value(weights, Selection(sel.pivots, budget)),
                us if timing else 0,
            ]
        )
    cols = ["method", "size", "objective", "min_pair_distance", "violations", "planted_recall", "gap_vs_exact", "runtime_us"]
    return Table(cols, rows)


def sweep_tau(tokens, weights, budget: int, taus: Sequence[float], *, backfill: bool = True) -> Table:
    """Greedy pruning at each threshold: objective, pre-backfill size, backfill count, mean cosine."""
    rows = []
    for tau in taus:
        sel, _ = greedy_prune(tokens, weights, PruneConfig(budget, float(tau), backfill))
        _, mean_cos = _pair_stats(tokens, sel.indices)
        rows.append([float(tau), objective_value(weights, sel), len(sel.pivots), sel.backfilled, mean_cos])
    return Table(["tau", "objective", "pre_backfill_size", "backfilled", "mean_pair_cosine"], rows)


def retention_table(n: int, budgets: Sequence[int]) -> Table:
    """Kept fraction and pruning ratio for each token budget."""
    rows = [[b, b / n, 1.0 - b / n] for b in budgets]
    return Table(["budget", "retention", "pruning_ratio"], rows)
