"""Seeded synthetic instances with planted cluster structure.

Each cluster owns a private block of coordinates, so tokens from different
clusters are exactly orthogonal. Inside a block a member is its anchor tilted
by an angle ``phi <= phi_max`` towards a random private direction, which
bounds every intra-cluster cosine from below by ``cos(2 * phi_max)``.
The query is a positive combination of the anchors, so a member's saliency
is ``cos(phi) * beta_c / |beta|``: the least-tilted member of each cluster is
its unique most salient token.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Selection, pairwise_similarities
from .errors import InfeasibleGeometry
from .saliency import compute_saliency


@dataclass(frozen=True)
class PlantedInstance:
    tokens: np.ndarray
    query: np.ndarray
    cluster_of: np.ndarray
    planted_critical: tuple[int, ...]
    intra_sim_min: float
    inter_sim_max: float

    @property
    def n_clusters(self) -> int:
        return len(self.planted_critical)

    @property
    def band(self) -> tuple[float, float]:
        """Open interval of thresholds that separate the clusters."""
        return self.inter_sim_max, self.intra_sim_min

    def weights(self) -> np.ndarray:
        return compute_saliency(self.tokens, self.query)

    def verify(self) -> None:
        """Raise InfeasibleGeometry unless every pair respects the similarity bands."""
        sim = pairwise_similarities(self.tokens)
        same = self.cluster_of[:, None] == self.cluster_of[None, :]
        np.fill_diagonal(same, False)
        cross = self.cluster_of[:, None] != self.cluster_of[None, :]
        if same.any() and sim[same].min() < self.intra_sim_min:
            raise InfeasibleGeometry(
                f"intra-cluster cosine {sim[same].min()!r} below {self.intra_sim_min!r}"
            )
        if cross.any() and sim[cross].max() > self.inter_sim_max:
            raise InfeasibleGeometry(
                f"cross-cluster cosine {sim[cross].max()!r} above {self.inter_sim_max!r}"
            )
        w = self.weights()
        for c, crit in enumerate(self.planted_critical):
            members = np.flatnonzero(self.cluster_of == c)
            others = w[members[members != crit]]
            if others.size and not (others < w[crit]).all():
                raise InfeasibleGeometry(f"planted token {crit} is not the strict maximum of cluster {c}")


def generate_clustered(
    seed: int,
    n_clusters: int,
    per_cluster: int,
    d: int,
    intra_sim_min: float,
    inter_sim_max: float,
) -> PlantedInstance:
    """Build and self-check a planted instance.

    Token values are rounded to float32 so the instance survives a round
    trip through a token file unchanged.
    """
    if n_clusters < 1 or per_cluster < 1:
        raise InfeasibleGeometry("need at least one cluster with at least one member")
    if 2 * n_clusters > d:
        raise InfeasibleGeometry(f"{n_clusters} clusters need d >= {2 * n_clusters}, got d={d}")
    if not 0.0 <= inter_sim_max < intra_sim_min <= 1.0:
        raise InfeasibleGeometry(
            f"need 0 <= inter_sim_max < intra_sim_min <= 1, got {inter_sim_max}, {intra_sim_min}"
        )
    if per_cluster > 1 and intra_sim_min >= 1.0:
        raise InfeasibleGeometry("intra_sim_min = 1 forces identical members; the planted maximum would not be unique")
    rng = np.random.default_rng(seed)
    width = d // n_clusters
    # 10% angular margin keeps float32 rounding inside the band
    phi_max = 0.5 * math.acos(intra_sim_min) * 0.9
    n = n_clusters * per_cluster
    tokens = np.zeros((n, d))
    cluster_of = np.repeat(np.arange(n_clusters), per_cluster)
    # distinct positive levels, cluster c gets beta[c]
    beta = 1.0 + rng.permutation(n_clusters) + 0.5 * rng.random(n_clusters)
    query = np.zeros(d)
    critical = []
    for c in range(n_clusters):
        lo = c * width
        query[lo] = beta[c]
        # member 0 is the anchor itself; the others tilt away by distinct angles
        phis = np.zeros(per_cluster)
        phis[1:] = phi_max * np.sort(rng.uniform(0.1, 1.0, per_cluster - 1))
        for k in range(per_cluster):
            row = c * per_cluster + k
            tokens[row, lo] = math.cos(phis[k])
            if width > 1 and phis[k] > 0:
                u = rng.standard_normal(width - 1)
                u /= np.linalg.norm(u)
                tokens[row, lo + 1 : lo + width] = math.sin(phis[k]) * u
        critical.append(c * per_cluster)
    # shuffle rows so cluster membership is not positional; cosines are unchanged
    perm = rng.permutation(n)
    tokens = tokens[perm].astype(np.float32).astype(np.float64)
    cluster_of = cluster_of[perm]
    where = np.empty(n, dtype=np.intp)
    where[perm] = np.arange(n)
    critical = [int(where[i]) for i in critical]
    query = query.astype(np.float32).astype(np.float64)
    inst = PlantedInstance(
        tokens=tokens,
        query=query,
        cluster_of=cluster_of,
        planted_critical=tuple(critical),
        intra_sim_min=float(intra_sim_min),
        inter_sim_max=float(inter_sim_max),
    )
    inst.verify()
    return inst


def recall_of_planted(sel: Selection, inst: PlantedInstance) -> float:
    """Fraction of the planted critical tokens present in the selection."""
    chosen = set(sel.indices)
    if not inst.planted_critical:
        return 1.0
    return sum(1 for i in inst.planted_critical if i in chosen) / len(inst.planted_critical)
