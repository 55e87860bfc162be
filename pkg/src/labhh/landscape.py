"""Static landscape descriptors of a TSP instance."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .instances import Instance, distance_matrix

FEATURE_CAP = 2.0


@dataclass(frozen=True)
class StaticFeatures:
    size_norm: float
    nn_mean: float
    nn_dispersion: float
    anisotropy: float
    radial_dispersion: float
    mst_per_node: float

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def to_dict(self) -> dict:
        return dict(zip(self.names(), astuple(self)))


def mst_total_weight(inst: Instance | None, dm: np.ndarray) -> float:
    """Weight of a minimum spanning tree, dense Prim in O(n^2)."""
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[0]
    if n < 2:
        raise ValueError("MST needs at least 2 sites")
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = dm[0].copy()
    best[0] = np.inf
    total = 0.0
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))
        total += float(cand[v])
        in_tree[v] = True
        np.minimum(best, dm[v], out=best)
    return total


def _cv(values: np.ndarray) -> float:
    mean = float(values.mean())
    if mean <= 0.0:
        return 0.0
    return float(values.std()) / mean


def static_features(inst: Instance, dm: np.ndarray | None = None) -> StaticFeatures:
    """Six scale-normalized descriptors of the site layout.

    Distance-like features are multiplied by sqrt(n) so a uniform layout
    gives values of order one at any size. Every entry is clamped to [0, 2].
    """
    n = inst.n
    if n < 3:
        raise ValueError("static features need at least 3 sites")
    if dm is None:
        dm = distance_matrix(inst)
    dm = np.asarray(dm, dtype=float)
    pts = inst.points
    root_n = math.sqrt(n)

    off = dm + np.diag(np.full(n, np.inf))
    nn = off.min(axis=1)
    nn_mean = float(nn.mean()) * root_n
    nn_dispersion = _cv(nn)

    cov = np.cov(pts, rowvar=False, bias=True)
    eig = np.linalg.eigvalsh(cov)
    lam_min, lam_max = max(float(eig[0]), 0.0), float(eig[-1])
    anisotropy = 1.0 - lam_min / lam_max if lam_max > 1e-15 else 0.0

    radial = np.hypot(*(pts - pts.mean(axis=0)).T)
    radial_dispersion = _cv(radial)

    mst_per_node = mst_total_weight(inst, dm) / n * root_n

    raw = (math.log10(n) / 3.0, nn_mean, nn_dispersion, anisotropy,
           radial_dispersion, mst_per_node)
    return StaticFeatures(*(min(max(v, 0.0), FEATURE_CAP) for v in raw))


class LandscapeFeatures(TransformerMixin, BaseEstimator):
    """Map a sequence of instances to an ``(m, 6)`` feature matrix.

    Stateless; ``fit`` only records the feature names.
    """

    def fit(self, X, y=None):
        self.feature_names_out_ = np.array(StaticFeatures.names(), dtype=object)
        self.n_features_out_ = len(self.feature_names_out_)
        return self

    def transform(self, X):
        if isinstance(X, Instance):
            X = [X]
        rows = []
        for inst in X:
            if not isinstance(inst, Instance):
                raise TypeError(f"expected Instance, got {type(inst).__name__}")
            rows.append(static_features(inst).as_array())
        return np.vstack(rows) if rows else np.empty((0, 6))

    def get_feature_names_out(self, input_features=None):
        return np.array(StaticFeatures.names(), dtype=object)
