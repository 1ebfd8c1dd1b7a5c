"""Geographic instances: haversine distances, k-means clustering, flight chains."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core import GtspInstance

EARTH_RADIUS_KM = 6371.0
AIRCRAFT_KG_PER_SEAT_KM = 0.09


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float
    label: str = ""
    cluster_hint: Optional[str] = None

    def __post_init__(self):
        if not -90 <= self.lat <= 90:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not -180 <= self.lon <= 180:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    p1, p2 = math.radians(a.lat), math.radians(b.lat)
    dphi = p2 - p1
    dlmb = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def haversine_matrix(points: Sequence[GeoPoint]) -> np.ndarray:
    lat = np.radians([p.lat for p in points])
    lon = np.radians([p.lon for p in points])
    dphi = lat[:, None] - lat[None, :]
    dlmb = lon[:, None] - lon[None, :]
    h = np.sin(dphi / 2) ** 2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin(dlmb / 2) ** 2
    d = 2 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))
    d = np.triu(d, k=1)
    return d + d.T


def aircraft_carbon_simple(distance_km: float, factor: float = AIRCRAFT_KG_PER_SEAT_KM) -> float:
    """Seat-level CO2 (kg) for a flight distance."""
    if distance_km < 0:
        raise ValueError("distance must be non-negative")
    return distance_km * factor


def read_geo_csv(path) -> list[GeoPoint]:
    """Read ``label,lat,lon,cluster_hint`` rows; an empty hint becomes ``None``."""
    points = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"label", "lat", "lon"} - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            hint = (row.get("cluster_hint") or "").strip() or None
            points.append(GeoPoint(float(row["lat"]), float(row["lon"]), row["label"].strip(), hint))
    return points


def write_geo_csv(points: Sequence[GeoPoint], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "lat", "lon", "cluster_hint"])
        for p in points:
            w.writerow([p.label, repr(p.lat), repr(p.lon), p.cluster_hint or ""])


# --- k-means --------------------------------------------------------------------

@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    sse: float
    sse_history: tuple
    iterations: int


def _kmeanspp(x, k, rng):
    centers = [x[rng.integers(len(x))]]
    for _ in range(1, k):
        d2 = ((x[:, None, :] - np.array(centers)[None, :, :]) ** 2).sum(-1).min(axis=1)
        total = d2.sum()
        if total <= 0:
            centers.append(x[rng.integers(len(x))])
        else:
            centers.append(x[rng.choice(len(x), p=d2 / total)])
    return np.array(centers, dtype=float)


def kmeans(x, k: int, seed=0, max_iter: int = 300) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding, run until assignments stop changing.

    A cluster that loses all its points is reseeded with the point farthest
    from its own centre, taken from a cluster with at least two members.
    """
    x = np.asarray(x, dtype=float)
    if not 1 <= k <= len(x):
        raise ValueError(f"k must lie in [1, {len(x)}], got {k}")
    rng = np.random.default_rng(seed)
    centers = _kmeanspp(x, k, rng)
    labels = None
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
        new = d2.argmin(axis=1)
        for c in range(k):
            if not np.any(new == c):
                # take the worst-fitted point from a cluster that can spare one
                counts = np.bincount(new, minlength=k)
                dist = d2[np.arange(len(x)), new]
                dist[counts[new] <= 1] = -1.0
                new[int(dist.argmax())] = c
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.array([x[labels == c].mean(axis=0) for c in range(k)])
        history.append(float(((x - centers[labels]) ** 2).sum()))
    sse = float(((x - centers[labels]) ** 2).sum())
    return KMeansResult(labels, centers, sse, tuple(history), it)


def elbow_sse(points: Sequence[GeoPoint], ks, seed=0) -> list[float]:
    """Final SSE of k-means on (lat, lon) for each k, for an elbow plot."""
    x = np.array([(p.lat, p.lon) for p in points])
    return [kmeans(x, k, seed).sse for k in ks]


def build_geo_instance(points: Sequence[GeoPoint], clustering="hint", k: Optional[int] = None,
                       seed=0, name: str = "geo") -> GtspInstance:
    """Instance over ``points`` with haversine km costs.

    ``clustering`` is ``"hint"`` (one cluster per distinct ``cluster_hint``, in
    first-seen order) or ``"kmeans"`` on (lat, lon) with ``k`` clusters.
    """
    if not points:
        raise ValueError("no points")
    if clustering == "hint":
        hints = [p.cluster_hint for p in points]
        if any(h is None for h in hints):
            raise ValueError("every point needs a cluster_hint for hint clustering")
        order = {h: i for i, h in enumerate(dict.fromkeys(hints))}
        cluster_of = np.array([order[h] for h in hints])
    elif clustering == "kmeans":
        if k is None:
            raise ValueError("kmeans clustering needs k")
        if k > len(points):
            raise ValueError(f"k = {k} exceeds the number of points ({len(points)})")
        x = np.array([(p.lat, p.lon) for p in points])
        cluster_of = kmeans(x, k, seed).labels
    else:
        raise ValueError(f"unknown clustering {clustering!r}")
    labels = tuple(p.label for p in points)
    return GtspInstance(name, haversine_matrix(points), cluster_of, labels=labels)


# --- flight chains --------------------------------------------------------------

def build_flight_chain(origin: GeoPoint, destination: GeoPoint,
                       connection_sets: Sequence[Sequence[GeoPoint]], name: str = "flights") -> GtspInstance:
    """Clusters ``[{origin}, set_1, ..., set_k, {destination}]`` over haversine km.

    Node order follows the cluster order, so node 0 is the origin and the last
    node the destination.
    """
    for i, s in enumerate(connection_sets):
        if len(s) == 0:
            raise ValueError(f"connection set {i} is empty")
    points = [origin]
    cluster_of = [0]
    for c, s in enumerate(connection_sets, start=1):
        points.extend(s)
        cluster_of.extend([c] * len(s))
    points.append(destination)
    cluster_of.append(len(connection_sets) + 1)
    labels = tuple(p.label for p in points)
    return GtspInstance(name, haversine_matrix(points), np.array(cluster_of), labels=labels)


def chain_distance_km(instance: GtspInstance, nodes: Sequence[int]) -> float:
    """One-way distance along ``nodes`` ordered by cluster (no closing leg)."""
    ordered = sorted(nodes, key=lambda v: instance.cluster_of[v])
    return float(sum(instance.cost[a, b] for a, b in zip(ordered, ordered[1:])))
