"""Ant colony solvers for the GTSP: SACO, Ant System, ACS and carbon-aware ACS.

All four variants share the pheromone state, the cluster tabu used during tour
construction and the stopping rule (no best-cost improvement for a window of
iterations, or an iteration cap). They differ in the edge weight used by the
transition rule and in how pheromone is updated:

========  ==========================  ===========  =================================
variant   edge weight                 exploit      updates
========  ==========================  ===========  =================================
saco      tau^alpha                   no           evaporate, deposit Q/f per ant
as        tau^alpha * eta^beta        no           evaporate, ant-cycle/density/
                                                   quantity deposits, elitist ants
acs       tau^alpha * eta^beta        r <= r_0     local per edge, global on best
caacs     tau^alpha * eta^beta * E^g  r <= r_0     local/global scaled by E
========  ==========================  ===========  =================================
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .carbon import NEUTRAL, CarbonMatrix, emission_factor, emission_factor_matrix
from .core import GtspInstance, Tour, closed_edges, validate_tour

VARIANTS = ("saco", "as", "acs", "caacs")
AS_UPDATES = ("ant_cycle", "ant_density", "ant_quantity")
BEST_STRATEGIES = ("global_best", "iteration_best")
GLOBAL_SCOPES = ("best_edges", "all_edges")


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters.

    ``stagnation_window=None`` means ``ceil(n_nodes / 5)``; ``0`` disables the
    stagnation stop so only ``max_iterations`` applies. ``a == 0`` is the
    neutral mode where every emission factor is 1.

    ``global_update_scope`` selects how the global rule treats edges off the
    reinforced tour: ``best_edges`` touches only the tour's edges,
    ``all_edges`` also decays every other edge by ``1 - rho_g``.
    """

    variant: str = "caacs"
    as_update: str = "ant_cycle"
    as_method: int = 1
    n_ants: int = 30
    n_elite: int = 0
    alpha: float = 0.1
    beta: float = 1.0
    gamma: float = 1.0
    rho: float = 0.1
    rho_l: float = 0.99
    rho_g: float = 0.1
    tau_0: float = 0.1
    q: float = 1.0
    r_0: float = 0.5
    a: float = 50.0
    max_iterations: int = 1000
    stagnation_window: Optional[int] = None
    seed: int = 0
    best_strategy: str = "global_best"
    global_update_scope: str = "best_edges"
    fixed_placement: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.as_update not in AS_UPDATES:
            raise ValueError(f"as_update must be one of {AS_UPDATES}")
        if self.as_method not in (1, 2):
            raise ValueError("as_method must be 1 or 2")
        if self.best_strategy not in BEST_STRATEGIES:
            raise ValueError(f"best_strategy must be one of {BEST_STRATEGIES}")
        if self.global_update_scope not in GLOBAL_SCOPES:
            raise ValueError(f"global_update_scope must be one of {GLOBAL_SCOPES}")
        for name in ("rho", "rho_l", "rho_g"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if not 0 <= self.r_0 <= 1:
            raise ValueError("r_0 must lie in [0, 1]")
        if self.tau_0 <= 0 or self.q <= 0:
            raise ValueError("tau_0 and q must be positive")
        if self.a != NEUTRAL and self.a < 1:
            raise ValueError(f"a must be >= 1 or 0 (neutral), got {self.a}")
        if self.n_ants < 1 or self.n_elite < 0 or self.max_iterations < 1:
            raise ValueError("n_ants and max_iterations must be >= 1, n_elite >= 0")
        if self.stagnation_window is not None and self.stagnation_window < 0:
            raise ValueError("stagnation_window must be >= 0")
        if self.as_method == 2 and not 0 <= self.alpha <= 1:
            raise ValueError("as_method 2 needs alpha in [0, 1]")

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)

    def window(self, n_nodes: int) -> int:
        if self.stagnation_window is None:
            return math.ceil(n_nodes / 5)
        return self.stagnation_window


@dataclass
class PheromoneState:
    tau: np.ndarray
    eta: np.ndarray

    def copy(self) -> "PheromoneState":
        return PheromoneState(self.tau.copy(), self.eta.copy())


@dataclass(frozen=True)
class RunResult:
    best_tour: Tour
    iterations_used: int
    history: tuple
    seed: int


def visibility(cost: np.ndarray) -> np.ndarray:
    """1/cost off the diagonal. Zero-cost edges get the reciprocal of the smallest
    positive cost (1 if there is none); the diagonal is 0."""
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    off = ~np.eye(n, dtype=bool)
    positive = cost[off & (cost > 0)]
    cap = 1.0 / positive.min() if positive.size else 1.0
    eta = np.full_like(cost, cap)
    np.divide(1.0, cost, out=eta, where=cost > 0)
    eta[~off] = 0.0
    return eta


def init_pheromone(instance: GtspInstance, carbon: Optional[CarbonMatrix], config: SolverConfig,
                   rng: Optional[np.random.Generator] = None) -> PheromoneState:
    n = instance.n_nodes
    if carbon is not None and carbon.c.shape != (n, n):
        raise ValueError("carbon matrix does not match instance")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    upper = np.triu(config.tau_0 * (1.0 - rng.random((n, n))), k=1)
    tau = upper + upper.T
    np.fill_diagonal(tau, config.tau_0)
    return PheromoneState(tau, visibility(instance.cost))


# --- transition rule --------------------------------------------------------

def _emission_row(carbon: Optional[CarbonMatrix], current: int, nodes, config: SolverConfig):
    if carbon is None or config.a == NEUTRAL or carbon.c_max == 0:
        return np.ones(len(nodes))
    return config.a ** (1.0 - carbon.c[current, nodes] / carbon.c_max)


def edge_weights(variant: str, state: PheromoneState, carbon: Optional[CarbonMatrix], current: int,
                 feasible: Sequence[int], config: SolverConfig) -> np.ndarray:
    """Unnormalised transition weights from ``current`` to each node of ``feasible``."""
    idx = np.asarray(feasible, dtype=np.int64)
    tau = state.tau[current, idx]
    eta = state.eta[current, idx]
    if variant == "saco":
        return tau ** config.alpha
    if variant == "as" and config.as_method == 2:
        return config.alpha * tau + (1.0 - config.alpha) * eta
    heur = eta ** config.beta
    if variant == "caacs":
        heur = heur * _emission_row(carbon, current, idx, config) ** config.gamma
    elif variant not in ("as", "acs"):
        raise ValueError(f"unknown variant {variant!r}")
    return tau ** config.alpha * heur


def transition_probabilities(variant: str, state: PheromoneState, carbon: Optional[CarbonMatrix],
                             current: int, feasible: Sequence[int], config: SolverConfig) -> np.ndarray:
    """Exploration (roulette) distribution over ``feasible``."""
    if len(feasible) == 0:
        raise ValueError("empty feasible set")
    w = edge_weights(variant, state, carbon, current, feasible, config)
    total = w.sum()
    if not (total > 0 and np.isfinite(total)):
        return np.full(len(w), 1.0 / len(w))
    return w / total


def _roulette(w: np.ndarray, rng: np.random.Generator, mask: Optional[np.ndarray] = None) -> int:
    c = np.cumsum(w)
    total = c[-1]
    if not (total > 0 and np.isfinite(total)):
        # every weight underflowed: fall back to a uniform pick
        pool = np.flatnonzero(mask) if mask is not None else np.arange(len(w))
        return int(pool[rng.integers(len(pool))])
    k = int(np.searchsorted(c, rng.random() * total, side="right"))
    if k >= len(w):
        k = int(np.flatnonzero(w)[-1])
    return k


def _draw(w: np.ndarray, exploit: bool, r_0: float, rng: np.random.Generator,
          mask: Optional[np.ndarray] = None) -> int:
    """Pick a position in ``w``. With ``exploit`` a uniform ``r <= r_0`` takes the
    argmax (first index on ties); otherwise roulette-wheel sampling."""
    if exploit and rng.random() <= r_0:
        k = int(np.argmax(w))
        if w[k] > 0:
            return k
        # every weight underflowed; the roulette falls back to a uniform pick
    return _roulette(w, rng, mask)


def _select(variant, state, carbon, current, feasible, config, rng):
    if len(feasible) == 0:
        raise ValueError("empty feasible set")
    nodes = sorted(int(v) for v in feasible)
    w = edge_weights(variant, state, carbon, current, nodes, config)
    return nodes[_draw(w, variant in ("acs", "caacs"), config.r_0, rng)]


def select_next_node_caacs(state, carbon, current, feasible, config, rng) -> int:
    return _select("caacs", state, carbon, current, feasible, config, rng)


def select_next_node_acs(state, carbon, current, feasible, config, rng) -> int:
    return _select("acs", state, carbon, current, feasible, config, rng)


def select_next_node_as(state, carbon, current, feasible, config, rng) -> int:
    return _select("as", state, carbon, current, feasible, config, rng)


def select_next_node_saco(state, carbon, current, feasible, config, rng) -> int:
    return _select("saco", state, carbon, current, feasible, config, rng)


# --- pheromone updates --------------------------------------------------------

def _edge_factor(carbon, i, j, config, emission) -> float:
    if config.variant != "caacs":
        return 1.0
    if emission is not None:
        return float(emission[i, j])
    if carbon is None or config.a == NEUTRAL:
        return 1.0
    return emission_factor(float(carbon.c[i, j]), carbon.c_max, config.a)


def local_update(state: PheromoneState, edge, carbon: Optional[CarbonMatrix], config: SolverConfig,
                 emission: Optional[np.ndarray] = None) -> float:
    """tau <- (1 - rho_l) tau + rho_l tau_0 [E] on both directions of ``edge``."""
    i, j = edge
    e = _edge_factor(carbon, i, j, config, emission)
    if config.variant == "caacs":
        new = (1.0 - config.rho_l) * state.tau[i, j] + config.rho_l * config.tau_0 * e
    else:
        new = (1.0 - config.rho_l) * state.tau[i, j] + config.rho_l * config.tau_0
    state.tau[i, j] = state.tau[j, i] = new
    return new


def _unique_edges(nodes):
    seen = set()
    out = []
    for i, j in closed_edges(nodes):
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def global_update(state: PheromoneState, best: Tour, carbon: Optional[CarbonMatrix], config: SolverConfig,
                  emission: Optional[np.ndarray] = None):
    """tau <- (1 - rho_g) tau + rho_g (1/f) [E] on the edges of ``best``.

    Returns the list of undirected edges that received a deposit.
    """
    edges = _unique_edges(best.nodes)
    if not edges:
        return edges
    f = best.cost_total
    if not f > 0:
        raise ValueError("best tour has zero cost; cannot deposit 1/f")
    keep = 1.0 - config.rho_g
    updates = []
    for i, j in edges:
        e = _edge_factor(carbon, i, j, config, emission)
        if config.variant == "caacs":
            updates.append(keep * state.tau[i, j] + config.rho_g * (1.0 / f) * e)
        else:
            updates.append(keep * state.tau[i, j] + config.rho_g * (1.0 / f))
    if config.global_update_scope == "all_edges":
        state.tau *= keep
    for (i, j), v in zip(edges, updates):
        state.tau[i, j] = state.tau[j, i] = v
    return edges


def _deposit(state, edges, amount):
    for i, j in edges:
        state.tau[i, j] += amount
        state.tau[j, i] = state.tau[i, j]


def update_saco(state: PheromoneState, tours: Sequence[Tour], config: SolverConfig):
    """Evaporate every edge by (1 - rho), then each ant deposits Q/f on its edges."""
    state.tau *= 1.0 - config.rho
    for t in tours:
        edges = _unique_edges(t.nodes)
        if not edges:
            continue
        if not t.cost_total > 0:
            raise ValueError("zero-cost tour cannot deposit Q/f")
        _deposit(state, edges, config.q / t.cost_total)


def update_as(state: PheromoneState, tours: Sequence[Tour], best: Optional[Tour], config: SolverConfig):
    """Ant System update: evaporation, per-ant deposits, optional elitist deposit."""
    state.tau *= 1.0 - config.rho
    for t in tours:
        edges = _unique_edges(t.nodes)
        if config.as_update == "ant_cycle":
            if edges and not t.cost_total > 0:
                raise ValueError("zero-cost tour cannot deposit Q/f")
            if edges:
                _deposit(state, edges, config.q / t.cost_total)
        elif config.as_update == "ant_density":
            _deposit(state, edges, config.q)
        else:
            for i, j in edges:
                # Q / d_ij, with the visibility cap standing in for zero-length edges
                _deposit(state, [(i, j)], config.q * state.eta[i, j])
    if best is not None and config.n_elite > 0:
        edges = _unique_edges(best.nodes)
        if edges:
            if not best.cost_total > 0:
                raise ValueError("zero-cost elite tour")
            _deposit(state, edges, config.n_elite * config.q / best.cost_total)


# --- colony -------------------------------------------------------------------

class _Colony:
    """Precomputed per-run data; keeps ``tau ** alpha`` in step with ``state.tau``."""

    def __init__(self, instance: GtspInstance, carbon: Optional[CarbonMatrix], state: PheromoneState,
                 config: SolverConfig):
        self.instance = instance
        self.carbon = carbon
        self.state = state
        self.config = config
        self.variant = config.variant
        self.members = [np.asarray(m, dtype=np.int64) for m in instance.clusters]
        self.cluster_of = instance.cluster_of.tolist()
        self.emission = None
        self.method2 = self.variant == "as" and config.as_method == 2
        if self.variant == "saco":
            self.heur = np.ones_like(state.eta)
        else:
            self.heur = state.eta ** config.beta
        if self.variant == "caacs":
            if carbon is not None:
                self.emission = emission_factor_matrix(carbon, config.a)
            else:
                self.emission = np.ones_like(state.eta)
            self.heur = self.heur * self.emission ** config.gamma
        self.exploit = self.variant in ("acs", "caacs")
        self.local = self.exploit
        self.sync()

    def sync(self):
        self.tau_pow = self.state.tau ** self.config.alpha

    def row(self, i):
        if self.method2:
            a = self.config.alpha
            return a * self.state.tau[i] + (1.0 - a) * self.state.eta[i]
        return self.tau_pow[i] * self.heur[i]

    def _local(self, i, j):
        new = local_update(self.state, (i, j), self.carbon, self.config, self.emission)
        self.tau_pow[i, j] = self.tau_pow[j, i] = new ** self.config.alpha

    def construct(self, start: int, rng) -> Tour:
        n = self.instance.n_nodes
        mask = np.ones(n)
        mask[self.members[self.cluster_of[start]]] = 0.0
        path = [start]
        cur = start
        cfg = self.config
        for _ in range(self.instance.n_clusters - 1):
            w = self.row(cur) * mask
            nxt = _draw(w, self.exploit, cfg.r_0, rng, mask)
            if self.local:
                self._local(cur, nxt)
            mask[self.members[self.cluster_of[nxt]]] = 0.0
            path.append(nxt)
            cur = nxt
        if self.local and len(path) > 1:
            self._local(cur, start)
        return self.tour(path)

    def tour(self, path) -> Tour:
        idx = np.asarray(path, dtype=np.int64)
        nxt = np.roll(idx, -1)
        cost = float(self.instance.cost[idx, nxt].sum())
        co2 = float(self.carbon.c[idx, nxt].sum()) if self.carbon is not None else 0.0
        return Tour(tuple(path), cost, co2)

    def update(self, tours, target: Tour):
        cfg = self.config
        if self.variant in ("acs", "caacs"):
            edges = global_update(self.state, target, self.carbon, cfg, self.emission)
            if cfg.global_update_scope == "all_edges":
                self.sync()
            else:
                for i, j in edges:
                    self.tau_pow[i, j] = self.tau_pow[j, i] = self.state.tau[i, j] ** cfg.alpha
            return
        if self.variant == "saco":
            update_saco(self.state, tours, cfg)
        else:
            update_as(self.state, tours, target, cfg)
        self.sync()


def construct_tour(instance: GtspInstance, carbon: Optional[CarbonMatrix], state: PheromoneState,
                   config: SolverConfig, start: int, rng) -> Tour:
    """One ant's tour from ``start``; applies local updates for acs/caacs."""
    if not 0 <= start < instance.n_nodes:
        raise ValueError(f"start node {start} out of range")
    return _Colony(instance, carbon, state, config).construct(int(start), rng)


def run(instance: GtspInstance, carbon: Optional[CarbonMatrix], config: SolverConfig,
        check_tours: bool = False) -> RunResult:
    """Run one colony to termination. Deterministic for a given ``config.seed``.

    ``check_tours`` validates every constructed tour (slow; meant for tests).
    """
    if config.variant == "caacs" and carbon is None and config.a != NEUTRAL:
        raise ValueError("caacs needs a carbon matrix unless a = 0 (neutral)")
    rng = np.random.default_rng(config.seed)
    state = init_pheromone(instance, carbon, config, rng)
    colony = _Colony(instance, carbon, state, config)
    n = instance.n_nodes
    window = config.window(n)
    fixed = rng.integers(n, size=config.n_ants) if config.fixed_placement else None

    best: Optional[Tour] = None
    history = []
    stale = 0
    it = 0
    for it in range(1, config.max_iterations + 1):
        starts = fixed if fixed is not None else rng.integers(n, size=config.n_ants)
        tours = [colony.construct(int(s), rng) for s in starts]
        if check_tours:
            for t in tours:
                diag = validate_tour(instance, t.nodes)
                assert diag, diag.describe()
        it_best = min(tours, key=lambda t: t.cost_total)
        if best is None or it_best.cost_total < best.cost_total:
            best = it_best
            stale = 0
        else:
            stale += 1
        target = best if config.best_strategy == "global_best" else it_best
        colony.update(tours, target)
        history.append((it, best.cost_total, best.carbon_total))
        if window and stale >= window:
            break
    return RunResult(best, it, tuple(history), config.seed)
