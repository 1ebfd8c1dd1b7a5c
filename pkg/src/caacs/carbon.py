"""Vehicle carbon-emission model, per-edge carbon matrices and the emission scaling factor.

Per-edge emission (kg CO2) over distance ``d`` metres at speed ``f`` m/s with payload ``F`` kg::

    lam * u * (y * d / f + gamma * beta * d * f**2 + gamma * s * (mu + F) * d)

    lam   = xi / (kappa * psi)
    s     = accel + g * sin(phi) + g * c_r * cos(phi)
    gamma = 1 / (1000 * omega * epsilon)
    beta  = 0.5 * c_d * rho_air * area
    y     = k_e * n_e * v_e

The three summands are the engine, speed and weight modules respectively.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np

SPEED_RANGE = (11.0, 38.0)
# a == NEUTRAL switches the scaling factor off (E == 1 everywhere)
NEUTRAL = 0.0


@dataclass(frozen=True)
class PhysicsConstants:
    xi: float = 1.0            # fuel-to-air mass ratio
    kappa: float = 44.0        # heating value of diesel, kJ/g
    psi: float = 737.0         # g/s -> L/s conversion, g/L
    g: float = 9.81            # m/s^2
    rho_air: float = 1.2041    # kg/m^3
    c_r: float = 0.01          # rolling resistance
    phi: float = 0.0           # road angle, rad
    accel: float = 0.0         # m/s^2
    u: float = 2.63            # kg CO2e per litre

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"{f.name} must be finite")
            if f.name in ("phi", "accel"):
                continue
            if v <= 0:
                raise ValueError(f"{f.name} must be positive, got {v}")

    @property
    def lam(self) -> float:
        return self.xi / (self.kappa * self.psi)

    @property
    def s(self) -> float:
        return self.accel + self.g * math.sin(self.phi) + self.g * self.c_r * math.cos(self.phi)


@dataclass(frozen=True)
class VehicleProfile:
    kind: str
    mu: float          # kerb weight, kg
    capacity: float    # max payload, kg
    k_e: float         # engine friction factor, kJ/rev/L
    n_e: float         # engine speed, rev/s
    v_e: float         # engine displacement, L
    c_d: float         # aerodynamic drag coefficient
    area: float        # frontal area, m^2
    epsilon: float     # drive-train efficiency
    omega: float       # diesel engine efficiency parameter

    def __post_init__(self):
        if self.kind not in ("LDV", "MDV", "HDV"):
            raise ValueError(f"unknown vehicle kind {self.kind!r}")
        for f in fields(self)[1:]:
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{f.name} must be positive, got {v}")
        if self.epsilon > 1 or self.omega > 1:
            raise ValueError("epsilon and omega must lie in (0, 1]")

    @property
    def gamma(self) -> float:
        return 1.0 / (1000.0 * self.omega * self.epsilon)

    def beta(self, consts: PhysicsConstants) -> float:
        return 0.5 * self.c_d * consts.rho_air * self.area

    @property
    def y(self) -> float:
        return self.k_e * self.n_e * self.v_e


@dataclass(frozen=True)
class EdgeKinematics:
    speed: np.ndarray
    payload: np.ndarray


@dataclass(frozen=True)
class CarbonMatrix:
    c: np.ndarray
    c_max: float

    @classmethod
    def from_array(cls, c) -> "CarbonMatrix":
        c = np.array(c, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("carbon matrix must be square")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise ValueError("carbon entries must be finite and non-negative")
        c.setflags(write=False)
        return cls(c, float(c.max()) if c.size else 0.0)

    @classmethod
    def zeros(cls, n: int) -> "CarbonMatrix":
        return cls.from_array(np.zeros((n, n)))


def edge_emission(consts: PhysicsConstants, profile: VehicleProfile, d, speed, payload):
    """Carbon (kg CO2) for one edge; accepts scalars or broadcastable arrays."""
    d = np.asarray(d, dtype=float)
    speed = np.asarray(speed, dtype=float)
    payload = np.asarray(payload, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    if np.any(speed <= 0):
        raise ValueError("speed must be positive")
    if np.any(payload < 0) or np.any(payload > profile.capacity):
        raise ValueError(f"payload must lie in [0, {profile.capacity}]")
    gamma = profile.gamma
    engine = profile.y * (d / speed)
    drag = gamma * profile.beta(consts) * d * speed**2
    weight = gamma * consts.s * (profile.mu + payload) * d
    out = consts.lam * consts.u * (engine + drag + weight)
    return float(out) if out.ndim == 0 else out


def sample_kinematics(instance, profile: VehicleProfile, seed) -> EdgeKinematics:
    """Uniform speed in [11, 38] m/s and payload in [0, capacity] per unordered edge."""
    rng = np.random.default_rng(seed)
    n = instance.n_nodes
    iu = np.triu_indices(n, k=1)
    speed = np.zeros((n, n))
    payload = np.zeros((n, n))
    speed[iu] = rng.uniform(*SPEED_RANGE, size=iu[0].size)
    payload[iu] = rng.uniform(0.0, profile.capacity, size=iu[0].size)
    speed = speed + speed.T
    payload = payload + payload.T
    # diagonal is never travelled; keep it valid for the formula
    np.fill_diagonal(speed, SPEED_RANGE[0])
    return EdgeKinematics(speed, payload)


def build_carbon_matrix(instance, consts: PhysicsConstants, profile: VehicleProfile,
                        kin: EdgeKinematics, distance_unit_scale: float = 1.0) -> CarbonMatrix:
    n = instance.n_nodes
    if kin.speed.shape != (n, n) or kin.payload.shape != (n, n):
        raise ValueError(f"kinematics shape {kin.speed.shape} does not match {n} nodes")
    if not (np.all(np.isfinite(kin.speed)) and np.all(np.isfinite(kin.payload))):
        raise ValueError("kinematics contain non-finite entries")
    c = edge_emission(consts, profile, instance.cost * distance_unit_scale, kin.speed, kin.payload)
    c = np.array(c, dtype=float).reshape(n, n)
    np.fill_diagonal(c, 0.0)
    if not np.all(np.isfinite(c)):
        raise ValueError("carbon matrix contains non-finite entries")
    return CarbonMatrix.from_array(c)


def emission_factor(c_ij: float, c_max: float, a: float) -> float:
    """a ** (1 - c_ij / c_max); 1 when every edge is emission-free."""
    if a < 1:
        raise ValueError(f"scaling base must be >= 1, got {a} (use neutral mode for a = 0)")
    if c_ij < 0 or c_ij > c_max:
        raise ValueError(f"carbon {c_ij} outside [0, c_max={c_max}]")
    if c_max == 0:
        return 1.0
    return float(a ** (1.0 - c_ij / c_max))


def emission_factor_matrix(carbon: CarbonMatrix, a: float) -> np.ndarray:
    """Element-wise scaling factors; ``a == NEUTRAL`` yields all ones."""
    n = carbon.c.shape[0]
    if a == NEUTRAL or carbon.c_max == 0:
        return np.ones((n, n))
    if a < 1:
        raise ValueError(f"scaling base must be >= 1 or neutral (0), got {a}")
    return a ** (1.0 - carbon.c / carbon.c_max)


# --- configuration file -----------------------------------------------------

_PHYSICS_KEYS = {f.name for f in fields(PhysicsConstants)}
_PROFILE_KEYS = {f.name for f in fields(VehicleProfile)} - {"kind"}


def default_config_path() -> Path:
    return Path(str(resources.files("caacs") / "data" / "vehicles.cfg"))


def load_vehicle_config(path: Optional[Union[str, Path]] = None, kind: Optional[str] = None):
    """Read ``(PhysicsConstants, VehicleProfile)`` from an INI-style key/value file.

    The ``[physics]`` section holds constants; each vehicle lives in a section
    named by its kind. ``kind`` defaults to the ``vehicle`` key of ``[physics]``
    (itself defaulting to LDV).
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    path = Path(path) if path is not None else default_config_path()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    phys = dict(parser["physics"]) if parser.has_section("physics") else {}
    kind = (kind or phys.pop("vehicle", "LDV")).upper()
    phys.pop("vehicle", None)
    unknown = set(phys) - _PHYSICS_KEYS
    if unknown:
        raise ValueError(f"unknown physics keys: {sorted(unknown)}")
    consts = PhysicsConstants(**{k: float(v) for k, v in phys.items()})
    if not parser.has_section(kind):
        raise ValueError(f"no [{kind}] section in {path}")
    prof = dict(parser[kind])
    unknown = set(prof) - _PROFILE_KEYS
    missing = _PROFILE_KEYS - set(prof)
    if unknown or missing:
        raise ValueError(f"[{kind}] unknown keys {sorted(unknown)}, missing keys {sorted(missing)}")
    profile = VehicleProfile(kind=kind, **{k: float(v) for k, v in prof.items()})
    return consts, profile


def carbon_for_instance(instance, consts=None, profile=None, seed=0, distance_unit_scale=1.0) -> CarbonMatrix:
    """Sample kinematics and build the carbon matrix in one step."""
    if consts is None or profile is None:
        c0, p0 = load_vehicle_config()
        consts = consts or c0
        profile = profile or p0
    kin = sample_kinematics(instance, profile, seed)
    return build_carbon_matrix(instance, consts, profile, kin, distance_unit_scale)
