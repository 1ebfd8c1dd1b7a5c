"""Exact GTSP by exhaustive enumeration, for tiny instances only."""

from __future__ import annotations

import itertools
import math
from typing import Optional

import numpy as np

from .carbon import CarbonMatrix
from .core import GtspInstance, Tour

DEFAULT_BUDGET = 10**8


class BudgetExceededError(RuntimeError):
    def __init__(self, count: int, budget: int):
        super().__init__(f"enumeration needs {count} tour evaluations, budget is {budget}")
        self.count = count
        self.budget = budget


def enumeration_count(instance: GtspInstance) -> int:
    """Node choices times cluster orderings with the first cluster pinned."""
    sizes = math.prod(len(c) for c in instance.clusters)
    return sizes * math.factorial(instance.n_clusters - 1)


def solve_exact(instance: GtspInstance, carbon: Optional[CarbonMatrix] = None, objective: str = "cost",
                budget: int = DEFAULT_BUDGET) -> Tour:
    """Minimum-objective tour over every node selection and cluster order.

    Cluster 0 is pinned to the first position (rotations) and only orders whose
    second cluster index is below the last one are kept (reflections). Ties go
    to the first tour met in lexicographic enumeration order.
    """
    if objective not in ("cost", "carbon"):
        raise ValueError(f"objective must be 'cost' or 'carbon', got {objective!r}")
    if objective == "carbon" and carbon is None:
        raise ValueError("carbon objective needs a carbon matrix")
    count = enumeration_count(instance)
    if count > budget:
        raise BudgetExceededError(count, budget)

    cost = instance.cost
    weight = cost if objective == "cost" else np.asarray(carbon.c)
    wl = weight.tolist()
    m = instance.n_clusters
    best_val = math.inf
    best_nodes = None
    for rest in itertools.permutations(range(1, m)):
        if len(rest) >= 2 and rest[0] > rest[-1]:
            continue
        order = (0,) + rest
        for nodes in itertools.product(*(instance.clusters[c] for c in order)):
            total = 0.0
            for i in range(m):
                total += wl[nodes[i]][nodes[(i + 1) % m]]
            if total < best_val:
                best_val = total
                best_nodes = nodes
    idx = np.asarray(best_nodes)
    nxt = np.roll(idx, -1)
    c_total = float(cost[idx, nxt].sum())
    co2 = float(np.asarray(carbon.c)[idx, nxt].sum()) if carbon is not None else 0.0
    return Tour(tuple(int(v) for v in best_nodes), c_total, co2)
