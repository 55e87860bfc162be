"""Seeded Euclidean TSP instances in five landscape families."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class Family(str, enum.Enum):
    UNIFORM = "uniform"
    CLUSTERED = "clustered"
    CORRIDOR = "corridor"
    GRID_JITTER = "grid_jitter"
    MIXED_DENSITY = "mixed_density"
    CUSTOM = "custom"  # user-supplied coordinates; not generatable

    @classmethod
    def parse(cls, value: "Family | str") -> "Family":
        if isinstance(value, Family):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"gridjitter": "grid_jitter", "grid": "grid_jitter",
                   "mixeddensity": "mixed_density", "mixed": "mixed_density"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown family {value!r}; expected one of "
                             f"{[f.value for f in cls]}") from None


# Stable integer codes feed the seed derivation; never renumber.
_FAMILY_CODE = {
    Family.UNIFORM: 1,
    Family.CLUSTERED: 2,
    Family.CORRIDOR: 3,
    Family.GRID_JITTER: 4,
    Family.MIXED_DENSITY: 5,
    Family.CUSTOM: 0,
}

GENERATED_FAMILIES = tuple(f for f in Family if f is not Family.CUSTOM)

CLUSTER_SIGMA = 0.05
CORRIDOR_SIGMA = 0.03
GRID_JITTER = 0.3


@dataclass(frozen=True, eq=False)
class Instance:
    """Immutable set of sites in the unit square.

    ``points`` is an ``(n, 2)`` float array flagged read-only.
    """

    id: str
    family: Family
    n: int
    seed: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must have shape (n, 2), got {pts.shape}")
        if pts.shape[0] != self.n:
            raise ValueError(f"n={self.n} does not match {pts.shape[0]} points")
        if self.n < 2:
            raise ValueError("an instance needs at least 2 sites")
        if not np.all(np.isfinite(pts)):
            raise ValueError("coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "family", Family.parse(self.family))

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return ((self.id, self.family, self.n, self.seed)
                == (other.id, other.family, other.n, other.seed)
                and np.array_equal(self.points, other.points))

    def __hash__(self):
        return hash((self.id, self.family, self.n, self.seed, self.points.tobytes()))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "family": self.family.value,
            "n": self.n,
            "seed": self.seed,
            "points": [[float(x), float(y)] for x, y in self.points],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        try:
            points = data["points"]
            n = int(data["n"])
            inst = cls(id=str(data["id"]), family=data["family"], n=n,
                       seed=int(data["seed"]), points=points)
        except KeyError as exc:
            raise ValueError(f"instance is missing field {exc.args[0]!r}") from None
        if np.any(inst.points < 0.0) or np.any(inst.points > 1.0):
            raise ValueError("coordinates must lie in [0, 1]")
        return inst

    def save(self, path) -> None:
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Instance":
        path = Path(path)
        with path.open("r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def instance_rng(family: Family | str, n: int, seed: int, *extra: int) -> np.random.Generator:
    """PCG64 stream keyed on (family, n, seed, *extra)."""
    key = [_FAMILY_CODE[Family.parse(family)], int(n), int(seed), *map(int, extra)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _uniform(rng, n):
    return rng.random((n, 2))


def _clustered(rng, n, k):
    centers = 0.1 + 0.8 * rng.random((k, 2))
    # first k points visit every center once so no cluster is empty
    head = np.arange(min(n, k))
    tail = rng.integers(0, k, size=max(0, n - k))
    assign = np.concatenate([head, tail])
    pts = centers[assign] + CLUSTER_SIGMA * rng.standard_normal((n, 2))
    return pts


def _corridor(rng, n):
    x = rng.random(n)
    y = 0.5 + CORRIDOR_SIGMA * rng.standard_normal(n)
    return np.column_stack([x, y])


def _grid_jitter(rng, n):
    g = math.ceil(math.sqrt(n))
    cell = 1.0 / g
    cells = rng.choice(g * g, size=n, replace=False)
    centers = np.column_stack([(cells % g) + 0.5, (cells // g) + 0.5]) * cell
    jitter = rng.uniform(-GRID_JITTER, GRID_JITTER, size=(n, 2)) * cell
    return centers + jitter


def _mixed_density(rng, n):
    n_uniform = math.ceil(n / 2)
    n_cluster = n - n_uniform
    parts = [_uniform(rng, n_uniform)]
    if n_cluster:
        parts.append(_clustered(rng, n_cluster, max(2, _round_half_up(n / 50))))
    return np.vstack(parts)


def generate(family: Family | str, n: int, seed: int, instance_id: str | None = None) -> Instance:
    """Generate a deterministic instance of ``family`` with ``n`` sites.

    The same ``(family, n, seed)`` always yields bit-identical coordinates.
    """
    family = Family.parse(family)
    if family is Family.CUSTOM:
        raise ValueError("the custom family cannot be generated")
    n = int(n)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = instance_rng(family, n, seed)
    if family is Family.UNIFORM:
        pts = _uniform(rng, n)
    elif family is Family.CLUSTERED:
        pts = _clustered(rng, n, max(2, _round_half_up(n / 25)))
    elif family is Family.CORRIDOR:
        pts = _corridor(rng, n)
    elif family is Family.GRID_JITTER:
        pts = _grid_jitter(rng, n)
    else:
        pts = _mixed_density(rng, n)
    pts = np.clip(pts, 0.0, 1.0)
    if instance_id is None:
        instance_id = f"{family.value}-n{n}-s{seed}"
    return Instance(id=instance_id, family=family, n=n, seed=int(seed), points=pts)


def distance(p, q) -> float:
    return math.hypot(float(p[0]) - float(q[0]), float(p[1]) - float(q[1]))


def distance_matrix(inst: Instance | np.ndarray) -> np.ndarray:
    """Dense symmetric Euclidean distance matrix (read-only)."""
    pts = inst.points if isinstance(inst, Instance) else np.asarray(inst, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    dm = np.hypot(diff[..., 0], diff[..., 1])
    dm.setflags(write=False)
    return dm
