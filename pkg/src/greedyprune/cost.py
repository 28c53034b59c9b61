"""TFLOPS-ratio cost model for pruning visual tokens after layer K.

Layers ``1..K`` process the full sequence ``mu = N + M``; layers ``K+1..T``
process the pruned sequence ``mu~ = N + M~``. Each layer costs
``4*mu*d**2 - 2*mu**2*d + 2*mu*d*m``. This is a prefill-shape model: decode
steps and KV-cache memory are not modelled.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

from .errors import DegenerateModel, TargetUnachievable


@dataclass(frozen=True)
class CostParams:
    """Transformer dimensions. ``pruned_visual`` defaults to ``orig_visual``."""

    total_layers: int
    prune_layer: int
    text_len: int
    orig_visual: int
    hidden_dim: int
    ffn_dim: int
    pruned_visual: Optional[int] = None

    def __post_init__(self):
        if self.pruned_visual is None:
            object.__setattr__(self, "pruned_visual", self.orig_visual)
        for name in ("total_layers", "prune_layer", "text_len", "orig_visual", "hidden_dim", "ffn_dim", "pruned_visual"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise ValueError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.total_layers < 1:
            raise ValueError("total_layers must be >= 1")
        if not 0 <= self.prune_layer <= self.total_layers:
            raise ValueError("prune_layer must lie in [0, total_layers]")
        if self.text_len < 0 or self.orig_visual < 0:
            raise ValueError("text_len and orig_visual must be non-negative")
        if not 0 <= self.pruned_visual <= self.orig_visual:
            raise ValueError("pruned_visual must lie in [0, orig_visual]")
        if self.hidden_dim < 1 or self.ffn_dim < 1:
            raise ValueError("hidden_dim and ffn_dim must be >= 1")
        # past mu = d + m/2 the per-layer cost stops growing with sequence length
        if 2 * self.full_len >= 2 * self.hidden_dim + self.ffn_dim:
            raise ValueError(
                f"sequence length {self.full_len} outside the monotone regime "
                f"(must be < hidden_dim + ffn_dim/2 = {self.hidden_dim + self.ffn_dim / 2})"
            )

    @property
    def full_len(self) -> int:
        return self.text_len + self.orig_visual

    @property
    def pruned_len(self) -> int:
        return self.text_len + self.pruned_visual

    def with_pruned(self, pruned_visual: int) -> "CostParams":
        return dataclasses.replace(self, pruned_visual=pruned_visual)


def _layer_flops_int(mu: int, d: int, m: int) -> int:
    return 4 * mu * d * d - 2 * mu * mu * d + 2 * mu * d * m


def layer_flops(seq_len, d, m) -> float:
    """Per-layer cost ``4*mu*d^2 - 2*mu^2*d + 2*mu*d*m``; exact for integer inputs."""
    if all(isinstance(v, int) for v in (seq_len, d, m)):
        return float(_layer_flops_int(seq_len, d, m))
    return 4.0 * seq_len * d * d - 2.0 * seq_len * seq_len * d + 2.0 * seq_len * d * m


def tflops_ratio(p: CostParams) -> float:
    """Compute of the pruned model relative to the unpruned one, in (0, 1]."""
    full = _layer_flops_int(p.full_len, p.hidden_dim, p.ffn_dim)
    if full <= 0:
        raise DegenerateModel(f"per-layer cost at sequence length {p.full_len} is {full}")
    pruned = _layer_flops_int(p.pruned_len, p.hidden_dim, p.ffn_dim)
    num = p.prune_layer * full + (p.total_layers - p.prune_layer) * pruned
    # int / int is correctly rounded, so equal work gives exactly 1.0
    return num / (p.total_layers * full)


def tokens_for_ratio(target: float, p: CostParams) -> int:
    """Largest ``M~`` in ``[0, M]`` whose ratio does not exceed ``target``.

    ``p.pruned_visual`` is ignored. Raises TargetUnachievable when even
    ``M~ = 0`` costs more than ``target``.
    """
    if not 0.0 < target <= 1.0:
        raise ValueError(f"target must lie in (0, 1], got {target!r}")
    floor = tflops_ratio(p.with_pruned(0))
    if target < floor:
        raise TargetUnachievable(target, floor)
    lo, hi = 0, p.orig_visual
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if tflops_ratio(p.with_pruned(mid)) <= target:
            lo = mid
        else:
            hi = mid - 1
    return lo
