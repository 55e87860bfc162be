"""Operator-selection controllers and the online search state.

LinUCB is the contextual learner; UCB1 and uniform random selection are the
non-contextual comparison controllers. All three share the
``select(z) -> arm`` / ``update(arm, z, reward)`` interface used by the
search loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

DEFAULT_ALPHA = 1.0
DEFAULT_WINDOW = 20
DEFAULT_STAGNATION = 30
DEFAULT_P_GATE = 0.5
REWARD_SCALE = 100.0
MAX_RATIO = 1.5


@dataclass(frozen=True)
class DynamicState:
    progress: float
    curr_ratio: float
    best_ratio: float
    recent_improvement: float
    recent_acceptance: float
    stagnation: float

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_array(self) -> np.ndarray:
        return np.array([self.progress, self.curr_ratio, self.best_ratio,
                         self.recent_improvement, self.recent_acceptance,
                         self.stagnation])


class SearchHistory:
    """Incumbent lengths and acceptance flags, one entry per iteration.

    ``lengths[t]`` is the incumbent length after ``t`` iterations, so
    ``lengths[0]`` is the initial tour length.
    """

    def __init__(self, initial_length: float):
        if initial_length <= 0:
            raise ValueError("initial length must be positive")
        self.f0 = float(initial_length)
        self.lengths = [self.f0]
        self._accept_cum = [0]
        self.best = self.f0
        self.last_improvement = 0

    @property
    def t(self) -> int:
        return len(self.lengths) - 1

    def record(self, length: float, accepted: bool, improved: bool) -> None:
        self.lengths.append(float(length))
        self._accept_cum.append(self._accept_cum[-1] + bool(accepted))
        if improved:
            self.last_improvement = self.t
        if length < self.best:
            self.best = float(length)

    def acceptances(self, start: int, stop: int) -> int:
        return self._accept_cum[stop] - self._accept_cum[start]


def dynamic_features(history: SearchHistory, t: int | None = None, T: int = 1,
                     window: int = DEFAULT_WINDOW,
                     stagnation_window: int = DEFAULT_STAGNATION) -> DynamicState:
    """Search-state descriptors after ``t`` completed iterations of a budget ``T``."""
    if t is None:
        t = history.t
    if t > T:
        raise ValueError(f"iteration {t} exceeds budget {T}")
    f0 = history.f0
    curr = history.lengths[t]
    lo = max(0, t - window)
    improvement = REWARD_SCALE * (history.lengths[lo] - curr) / f0
    acceptance = history.acceptances(lo, t) / (t - lo) if t > lo else 0.0
    return DynamicState(
        progress=t / T,
        curr_ratio=min(curr / f0, MAX_RATIO),
        best_ratio=min(history.best / f0, MAX_RATIO),
        recent_improvement=min(max(improvement, 0.0), 1.0),
        recent_acceptance=acceptance,
        stagnation=min(1.0, (t - history.last_improvement) / stagnation_window),
    )


def reward(f_curr: float, f_cand: float, f_init: float) -> float:
    """Clipped relative improvement, scaled so a 1% gain saturates at 1."""
    if f_init <= 0:
        raise ValueError("initial length must be positive")
    r = REWARD_SCALE * (f_curr - f_cand) / f_init
    return min(max(r, -1.0), 1.0)


def _argmax_random_ties(scores: np.ndarray, rng) -> int:
    top = scores.max()
    ties = np.flatnonzero(scores == top)
    if len(ties) == 1:
        return int(ties[0])
    return int(ties[rng.integers(len(ties))])


# --- LinUCB -----------------------------------------------------------------

@dataclass
class LinUCBArm:
    """Ridge-regression statistics for one operator, prior ``A = I``."""

    A: np.ndarray
    b: np.ndarray
    pulls: int = 0

    @classmethod
    def fresh(cls, dim: int) -> "LinUCBArm":
        return cls(np.eye(dim), np.zeros(dim))

    @property
    def theta(self) -> np.ndarray:
        return np.linalg.solve(self.A, self.b)


def linucb_scores(arms, z, alpha: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    A = np.stack([arm.A for arm in arms])
    rhs = np.stack([np.column_stack([arm.b, z]) for arm in arms])
    sol = np.linalg.solve(A, rhs)
    mean = sol[:, :, 0] @ z
    width = np.maximum(sol[:, :, 1] @ z, 0.0)
    return mean + alpha * np.sqrt(width)


def linucb_select(arms, z, alpha: float, rng) -> int:
    """Arm maximizing ``theta^T z + alpha * sqrt(z^T A^-1 z)``; random tie-break."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    return _argmax_random_ties(linucb_scores(arms, z, alpha), rng)


def linucb_update(arm: LinUCBArm, z, r: float) -> None:
    z = np.asarray(z, dtype=float)
    arm.A += np.outer(z, z)
    arm.b += r * z
    arm.pulls += 1


class LinUCBController:
    """LinUCB over ``n_arms`` operators with ``dim``-dimensional contexts.

    Per-arm ``A^-1`` and ``theta`` are refactored from scratch after each
    update of that arm, so selection never re-solves untouched arms.
    """

    contextual = True

    def __init__(self, n_arms: int, dim: int, alpha: float = DEFAULT_ALPHA, rng=None):
        if alpha < 0:
            raise ValueError("alpha must be non-negative")
        self.alpha = float(alpha)
        self.dim = dim
        self.arms = [LinUCBArm.fresh(dim) for _ in range(n_arms)]
        self.rng = rng if rng is not None else np.random.default_rng()
        self._A_inv = np.stack([np.eye(dim) for _ in range(n_arms)])
        self._theta = np.zeros((n_arms, dim))

    def scores(self, z: np.ndarray) -> np.ndarray:
        mean = self._theta @ z
        width = np.maximum(np.einsum("i,kij,j->k", z, self._A_inv, z), 0.0)
        return mean + self.alpha * np.sqrt(width)

    def select(self, z: np.ndarray) -> int:
        return _argmax_random_ties(self.scores(z), self.rng)

    def update(self, arm: int, z: np.ndarray, r: float) -> None:
        a = self.arms[arm]
        linucb_update(a, z, r)
        sol = np.linalg.solve(a.A, np.column_stack([np.eye(self.dim), a.b]))
        self._A_inv[arm] = sol[:, :-1]
        self._theta[arm] = sol[:, -1]


# --- gate -------------------------------------------------------------------

def stagnation_gate(selected: int, state: DynamicState, rng,
                    p_gate: float = DEFAULT_P_GATE, two_opt_arm: int | None = 0) -> int:
    """Redirect to the 2-opt arm with probability ``p_gate`` once stagnation saturates."""
    if two_opt_arm is None or state.stagnation < 1.0:
        return selected
    if rng.random() < p_gate:
        return two_opt_arm
    return selected


# --- UCB1 and random ----------------------------------------------------------

def ucb1_select(counts, sums, rng) -> int:
    counts = np.asarray(counts)
    unpulled = np.flatnonzero(counts == 0)
    if len(unpulled):
        return int(unpulled[0])
    total = counts.sum()
    index = np.asarray(sums, dtype=float) / counts + np.sqrt(2.0 * math.log(total) / counts)
    return _argmax_random_ties(index, rng)


def ucb1_update(counts, sums, arm: int, r: float) -> None:
    counts[arm] += 1
    sums[arm] += r


def random_select(n_arms: int, rng) -> int:
    return int(rng.integers(n_arms))


class UCB1Controller:
    contextual = False

    def __init__(self, n_arms: int, rng=None):
        self.counts = np.zeros(n_arms, dtype=np.int64)
        self.sums = np.zeros(n_arms)
        self.rng = rng if rng is not None else np.random.default_rng()

    def select(self, z=None) -> int:
        return ucb1_select(self.counts, self.sums, self.rng)

    def update(self, arm: int, z, r: float) -> None:
        ucb1_update(self.counts, self.sums, arm, r)


@dataclass
class RandomController:
    n_arms: int
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    contextual = False

    def select(self, z=None) -> int:
        return random_select(self.n_arms, self.rng)

    def update(self, arm: int, z, r: float) -> None:
        pass
