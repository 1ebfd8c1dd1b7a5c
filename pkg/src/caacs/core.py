"""Problem instance model, tours, feasibility checks and objective evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class InvalidInstanceError(ValueError):
    pass


class InvalidTourError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GtspInstance:
    """A symmetric GTSP instance with a dense cost matrix.

    ``cluster_of[v]`` gives the 0-based cluster of node ``v``. Absent edges
    must already be replaced by a finite sentinel (see :meth:`from_matrix`).
    """

    name: str
    cost: np.ndarray
    cluster_of: np.ndarray
    absent_cost: Optional[float] = None
    optimum: Optional[float] = None
    labels: Optional[tuple] = None
    clusters: tuple = field(init=False, repr=False)

    def __post_init__(self):
        cost = np.array(self.cost, dtype=float)
        cluster_of = np.array(self.cluster_of, dtype=np.int64)
        if cost.ndim != 2 or cost.shape[0] != cost.shape[1] or cost.shape[0] == 0:
            raise InvalidInstanceError(f"cost must be a non-empty square matrix, got shape {cost.shape}")
        n = cost.shape[0]
        if cluster_of.shape != (n,):
            raise InvalidInstanceError(f"cluster_of has length {cluster_of.size}, expected {n}")
        if not np.all(np.isfinite(cost)):
            raise InvalidInstanceError("cost contains non-finite entries; use from_matrix to apply a sentinel")
        if np.any(cost < 0):
            raise InvalidInstanceError("cost entries must be non-negative")
        if not np.array_equal(cost, cost.T):
            raise InvalidInstanceError("cost matrix is not symmetric")
        if np.any(np.diag(cost) != 0):
            raise InvalidInstanceError("cost diagonal must be zero")
        if cluster_of.min() < 0:
            raise InvalidInstanceError("negative cluster index")
        m = int(cluster_of.max()) + 1
        members = tuple(tuple(int(v) for v in np.flatnonzero(cluster_of == c)) for c in range(m))
        empty = [c for c, mem in enumerate(members) if not mem]
        if empty:
            raise InvalidInstanceError(f"empty clusters: {empty}")
        cost.setflags(write=False)
        cluster_of.setflags(write=False)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "cluster_of", cluster_of)
        object.__setattr__(self, "clusters", members)

    @classmethod
    def from_matrix(cls, name, cost, cluster_of, absent_cost=None, optimum=None, labels=None):
        """Build an instance, replacing ``inf``/``nan`` entries by a finite sentinel.

        The sentinel defaults to ``n * max_finite + 1`` so that any tour using an
        absent edge is worse than every tour that avoids them.
        """
        cost = np.array(cost, dtype=float)
        bad = ~np.isfinite(cost)
        if bad.any():
            if absent_cost is None:
                finite = cost[~bad]
                top = float(finite.max()) if finite.size else 0.0
                absent_cost = cost.shape[0] * top + 1.0
            cost[bad] = absent_cost
        return cls(name, cost, cluster_of, absent_cost=absent_cost, optimum=optimum, labels=labels)

    @property
    def n_nodes(self) -> int:
        return self.cost.shape[0]

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def __eq__(self, other):
        if not isinstance(other, GtspInstance):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self.cost, other.cost)
            and np.array_equal(self.cluster_of, other.cluster_of)
            and self.optimum == other.optimum
        )

    def __hash__(self):
        return hash((self.name, self.n_nodes, self.n_clusters))


@dataclass(frozen=True)
class Tour:
    nodes: tuple
    cost_total: float
    carbon_total: float = 0.0

    def edges(self):
        return closed_edges(self.nodes)


@dataclass(frozen=True)
class TourDiagnosis:
    """Outcome of :func:`validate_tour`; truthy iff the tour is feasible."""

    ok: bool
    out_of_range: tuple = ()
    duplicated_clusters: tuple = ()
    missing_clusters: tuple = ()

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.out_of_range:
            parts.append(f"out-of-range nodes {list(self.out_of_range)}")
        if self.duplicated_clusters:
            parts.append(f"duplicated clusters {list(self.duplicated_clusters)}")
        if self.missing_clusters:
            parts.append(f"missing clusters {list(self.missing_clusters)}")
        return "; ".join(parts)


def closed_edges(nodes: Sequence[int]):
    """Consecutive pairs of ``nodes`` including the edge back to the start."""
    k = len(nodes)
    return [(nodes[i], nodes[(i + 1) % k]) for i in range(k)]


def validate_tour(instance: GtspInstance, nodes: Sequence[int]) -> TourDiagnosis:
    n = instance.n_nodes
    bad = tuple(v for v in nodes if not (0 <= int(v) < n))
    seen: dict[int, int] = {}
    for v in nodes:
        if 0 <= int(v) < n:
            c = int(instance.cluster_of[v])
            seen[c] = seen.get(c, 0) + 1
    dup = tuple(sorted(c for c, k in seen.items() if k > 1))
    missing = tuple(c for c in range(instance.n_clusters) if c not in seen)
    ok = not bad and not dup and not missing and len(nodes) == instance.n_clusters
    return TourDiagnosis(ok, bad, dup, missing)


def _path_sum(matrix: np.ndarray, nodes: Sequence[int]) -> float:
    idx = np.asarray(nodes, dtype=np.int64)
    return float(matrix[idx, np.roll(idx, -1)].sum())


def tour_cost(instance: GtspInstance, nodes: Sequence[int]) -> float:
    diag = validate_tour(instance, nodes)
    if not diag:
        raise InvalidTourError(diag.describe())
    return _path_sum(instance.cost, nodes)


def tour_carbon(instance: GtspInstance, carbon, nodes: Sequence[int]) -> float:
    """Carbon along the closed tour; ``carbon`` is a CarbonMatrix or a plain array."""
    c = np.asarray(getattr(carbon, "c", carbon), dtype=float)
    if c.shape != instance.cost.shape:
        raise ValueError(f"carbon matrix shape {c.shape} does not match instance {instance.cost.shape}")
    diag = validate_tour(instance, nodes)
    if not diag:
        raise InvalidTourError(diag.describe())
    return _path_sum(c, nodes)


def make_tour(instance: GtspInstance, nodes: Sequence[int], carbon=None) -> Tour:
    nodes = tuple(int(v) for v in nodes)
    cost = tour_cost(instance, nodes)
    co2 = tour_carbon(instance, carbon, nodes) if carbon is not None else 0.0
    return Tour(nodes, cost, co2)
