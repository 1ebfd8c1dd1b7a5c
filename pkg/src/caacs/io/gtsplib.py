"""Reader and writer for TSPLIB-style files with GTSP set extensions.

Supported header keywords (``KEY : value``)::

    NAME, TYPE, COMMENT, DIMENSION, GTSP_SETS, EDGE_WEIGHT_TYPE,
    EDGE_WEIGHT_FORMAT, NODE_COORD_TYPE, DISPLAY_DATA_TYPE, OPTIMUM

Sections: NODE_COORD_SECTION, EDGE_WEIGHT_SECTION, GTSP_SET_SECTION,
DISPLAY_DATA_SECTION (skipped), terminated by EOF.

Edge weight types: EUC_2D, GEO, EXPLICIT (FULL_MATRIX, UPPER_ROW). Each
GTSP_SET_SECTION line is ``set_id node node ... -1`` with 1-based ids; a set
may span several lines until its ``-1``. ``OPTIMUM`` is a non-standard
extension carrying the best known tour cost.
"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Optional

import numpy as np

from ..core import GtspInstance

HEADER_KEYS = {
    "NAME", "TYPE", "COMMENT", "DIMENSION", "GTSP_SETS", "EDGE_WEIGHT_TYPE",
    "EDGE_WEIGHT_FORMAT", "NODE_COORD_TYPE", "DISPLAY_DATA_TYPE", "OPTIMUM",
}
SECTIONS = {"NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION", "GTSP_SET_SECTION", "DISPLAY_DATA_SECTION"}
WEIGHT_TYPES = {"EUC_2D", "GEO", "EXPLICIT"}
WEIGHT_FORMATS = {"FULL_MATRIX", "UPPER_ROW"}

_NAME_RE = re.compile(r"^(\d+)([A-Za-z_]+?)(\d+)$")


class GtspFormatError(ValueError):
    pass


def parse_instance_name(name: str):
    """Split a library name such as ``20kroA100`` into ``(20, 100, 'kroA')``.

    Returns ``None`` when the name does not follow the convention.
    """
    m = _NAME_RE.match(name.strip())
    if not m:
        return None
    return int(m.group(1)), int(m.group(3)), m.group(2)


def euc_2d_matrix(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=-1))
    return np.floor(d + 0.5)


def geo_matrix(coords: np.ndarray) -> np.ndarray:
    """TSPLIB GEO distances (DDD.MM encoding, idealised sphere, truncated to int)."""
    pi = 3.141592
    rrr = 6378.388
    n = len(coords)

    def rad(x):
        deg = math.trunc(x)
        return pi * (deg + 5.0 * (x - deg) / 3.0) / 180.0

    lat = [rad(c[0]) for c in coords]
    lon = [rad(c[1]) for c in coords]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            q1 = math.cos(lon[i] - lon[j])
            q2 = math.cos(lat[i] - lat[j])
            q3 = math.cos(lat[i] + lat[j])
            d = int(rrr * math.acos(0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)) + 1.0)
            out[i, j] = out[j, i] = d
    return out


def _number(tok: str) -> float:
    v = float(tok)
    return int(v) if v.is_integer() else v


def parse_gtsplib(text: str, name: Optional[str] = None) -> GtspInstance:
    header: dict[str, str] = {}
    coords: dict[int, tuple] = {}
    weights: list[float] = []
    sets: dict[int, list[int]] = {}
    lines = text.splitlines()
    i = 0
    section = None
    pending_set: Optional[int] = None

    def split_key(line):
        key, _, value = line.partition(":")
        return key.strip().upper(), value.strip()

    while i < len(lines):
        raw = lines[i].strip()
        i += 1
        if not raw:
            continue
        head = raw.split(":", 1)[0].strip().upper() if ":" in raw else raw.split()[0].upper()
        if head == "EOF":
            break
        if head in SECTIONS:
            section = head
            pending_set = None
            continue
        if head in HEADER_KEYS:
            key, value = split_key(raw)
            header[key] = value
            section = None
            continue
        if section is None or head[0].isalpha():
            raise GtspFormatError(f"unknown keyword {head!r} on line {i}")
        toks = raw.split()
        if section == "NODE_COORD_SECTION":
            if len(toks) != 3:
                raise GtspFormatError(f"bad coordinate line {i}: {raw!r}")
            coords[int(toks[0])] = (float(toks[1]), float(toks[2]))
        elif section == "EDGE_WEIGHT_SECTION":
            weights.extend(_number(t) for t in toks)
        elif section == "GTSP_SET_SECTION":
            vals = [int(t) for t in toks]
            for v in vals:
                if pending_set is None:
                    pending_set = v
                    if v in sets:
                        raise GtspFormatError(f"set {v} declared twice")
                    sets[v] = []
                elif v == -1:
                    pending_set = None
                else:
                    sets[pending_set].append(v)
        # DISPLAY_DATA_SECTION lines are ignored

    if pending_set is not None:
        raise GtspFormatError(f"set {pending_set} not terminated by -1")
    if "DIMENSION" not in header:
        raise GtspFormatError("DIMENSION missing")
    n = int(header["DIMENSION"])
    inst_name = header.get("NAME", name or "unnamed")
    wtype = header.get("EDGE_WEIGHT_TYPE", "").upper()
    if wtype not in WEIGHT_TYPES:
        raise GtspFormatError(f"unsupported EDGE_WEIGHT_TYPE {wtype or '(missing)'!r}")

    if wtype == "EXPLICIT":
        fmt = header.get("EDGE_WEIGHT_FORMAT", "").upper()
        if fmt not in WEIGHT_FORMATS:
            raise GtspFormatError(f"unsupported EDGE_WEIGHT_FORMAT {fmt or '(missing)'!r}")
        cost = _explicit_matrix(weights, n, fmt)
    else:
        if sorted(coords) != list(range(1, n + 1)):
            raise GtspFormatError(f"NODE_COORD_SECTION has {len(coords)} nodes, DIMENSION is {n}")
        xy = np.array([coords[k] for k in range(1, n + 1)], dtype=float)
        cost = euc_2d_matrix(xy) if wtype == "EUC_2D" else geo_matrix(xy)

    cluster_of = _cluster_assignment(sets, n)
    m = len(sets)
    if "GTSP_SETS" in header and int(header["GTSP_SETS"]) != m:
        raise GtspFormatError(f"GTSP_SETS is {header['GTSP_SETS']} but {m} sets were given")
    parsed = parse_instance_name(inst_name)
    if parsed and "GTSP_SETS" not in header and (parsed[0] != m or parsed[1] != n):
        raise GtspFormatError(f"name {inst_name!r} implies ({parsed[0]}, {parsed[1]}), file has ({m}, {n})")
    optimum = float(header["OPTIMUM"]) if "OPTIMUM" in header else None
    return GtspInstance(inst_name, cost, cluster_of, optimum=optimum)


def _explicit_matrix(weights, n, fmt):
    if fmt == "FULL_MATRIX":
        if len(weights) != n * n:
            raise GtspFormatError(f"FULL_MATRIX needs {n * n} weights, got {len(weights)}")
        return np.array(weights, dtype=float).reshape(n, n)
    need = n * (n - 1) // 2
    if len(weights) != need:
        raise GtspFormatError(f"UPPER_ROW needs {need} weights, got {len(weights)}")
    cost = np.zeros((n, n))
    cost[np.triu_indices(n, k=1)] = weights
    return cost + cost.T


def _cluster_assignment(sets, n):
    if not sets:
        raise GtspFormatError("GTSP_SET_SECTION missing or empty")
    ids = sorted(sets)
    if ids != list(range(1, len(ids) + 1)):
        raise GtspFormatError(f"set ids must be 1..{len(ids)}, got {ids}")
    cluster_of = np.full(n, -1, dtype=np.int64)
    for sid in ids:
        if not sets[sid]:
            raise GtspFormatError(f"set {sid} is empty")
        for v in sets[sid]:
            if not 1 <= v <= n:
                raise GtspFormatError(f"set {sid} references node {v} outside 1..{n}")
            if cluster_of[v - 1] == sid - 1:
                raise GtspFormatError(f"node {v} listed twice in set {sid}")
            if cluster_of[v - 1] != -1:
                raise GtspFormatError(f"node {v} assigned to multiple sets ({cluster_of[v - 1] + 1} and {sid})")
            cluster_of[v - 1] = sid - 1
    orphans = np.flatnonzero(cluster_of == -1) + 1
    if orphans.size:
        raise GtspFormatError(f"nodes not assigned to any set: {orphans.tolist()}")
    return cluster_of


def read_gtsplib(path) -> GtspInstance:
    path = Path(path)
    return parse_gtsplib(path.read_text(encoding="utf-8", errors="replace"), name=path.stem)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def serialize_gtsplib(instance: GtspInstance) -> str:
    """Write ``instance`` as EXPLICIT FULL_MATRIX; ``parse_gtsplib`` reads it back exactly."""
    n = instance.n_nodes
    out = [
        f"NAME : {instance.name}",
        "TYPE : GTSP",
        f"DIMENSION : {n}",
        f"GTSP_SETS : {instance.n_clusters}",
        "EDGE_WEIGHT_TYPE : EXPLICIT",
        "EDGE_WEIGHT_FORMAT : FULL_MATRIX",
    ]
    if instance.optimum is not None:
        out.append(f"OPTIMUM : {_fmt(instance.optimum)}")
    out.append("EDGE_WEIGHT_SECTION")
    for row in instance.cost:
        out.append(" ".join(_fmt(v) for v in row))
    out.append("GTSP_SET_SECTION")
    for c, members in enumerate(instance.clusters):
        out.append(" ".join([str(c + 1)] + [str(v + 1) for v in members] + ["-1"]))
    out.append("EOF")
    return "\n".join(out) + "\n"


def write_gtsplib(instance: GtspInstance, path) -> None:
    Path(path).write_text(serialize_gtsplib(instance), encoding="utf-8")
