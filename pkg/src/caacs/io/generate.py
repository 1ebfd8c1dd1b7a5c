"""Random GTSP instances: uniform symmetric weights, random non-empty clusters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import GtspInstance


def default_clusters(n_nodes: int) -> int:
    """M = N / 5, rounded up so small N still gets at least one cluster."""
    return max(1, math.ceil(n_nodes / 5))


@dataclass(frozen=True)
class GeneratorSpec:
    n_nodes: int
    n_clusters: Optional[int] = None
    weight_min: float = 10.0
    weight_max: float = 5000.0
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        m = self.clusters
        if not 1 <= m <= self.n_nodes:
            raise ValueError(f"n_clusters must lie in [1, {self.n_nodes}], got {m}")
        if not 0 < self.weight_min <= self.weight_max:
            raise ValueError("need 0 < weight_min <= weight_max")

    @property
    def clusters(self) -> int:
        return self.n_clusters if self.n_clusters is not None else default_clusters(self.n_nodes)


def generate_random(spec: GeneratorSpec, name: Optional[str] = None) -> GtspInstance:
    rng = np.random.default_rng(spec.seed)
    n, m = spec.n_nodes, spec.clusters
    upper = np.triu(rng.uniform(spec.weight_min, spec.weight_max, size=(n, n)), k=1)
    cost = upper + upper.T
    order = rng.permutation(n)
    cluster_of = np.empty(n, dtype=np.int64)
    cluster_of[order[:m]] = np.arange(m)
    cluster_of[order[m:]] = rng.integers(m, size=n - m)
    return GtspInstance(name or f"{m}rand{n}_s{spec.seed}", cost, cluster_of)
