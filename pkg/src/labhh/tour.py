"""Tours, the four low-level moves, O(1) move deltas and candidate pools.

Move index semantics (positions in the current order):

* ``TWO_OPT (i, j)``   reverse positions ``i..j`` inclusive, ``1 <= i < j <= n-1``.
* ``SWAP (i, j)``      exchange positions ``i != j`` (``i == j`` is accepted as a
  no-op but never sampled).
* ``RELOCATE (i, j)``  remove position ``i`` and reinsert it in the gap before
  position ``j`` (cyclically, ``j = 0`` is the gap closing the tour);
  ``j`` not in ``{i, i+1 mod n}``.
* ``OR_OPT2 (i, j)``   same as relocate for the block ``[i, i+1]``,
  ``0 <= i <= n-2``, ``j`` not in ``{i, i+1, i+2 mod n}``.

Hot loops call the underscore helpers with plain lists; the public
functions validate and wrap them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

POOL_SIZE = 3
DRAWS_PER_MOVE = 2  # uniforms consumed per sampled move, for every operator
MIN_SITES = 5


class Op(enum.IntEnum):
    TWO_OPT = 0
    SWAP = 1
    RELOCATE = 2
    OR_OPT2 = 3

    @classmethod
    def parse(cls, value: "Op | str | int") -> "Op":
        if isinstance(value, Op):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        table = {"2opt": cls.TWO_OPT, "twoopt": cls.TWO_OPT, "swap": cls.SWAP,
                 "relocate": cls.RELOCATE, "oropt": cls.OR_OPT2,
                 "oropt2": cls.OR_OPT2}
        if key not in table:
            raise ValueError(f"unknown operator {value!r}")
        return table[key]

    @property
    def label(self) -> str:
        return ("two_opt", "swap", "relocate", "or_opt2")[self]


ALL_OPS = tuple(Op)


class Move(NamedTuple):
    op: Op
    i: int
    j: int


@dataclass(frozen=True)
class Tour:
    order: tuple
    length: float

    @classmethod
    def from_order(cls, order: Sequence[int], dm) -> "Tour":
        order = tuple(int(v) for v in order)
        return cls(order, tour_length(order, dm))

    @property
    def n(self) -> int:
        return len(self.order)


def _check_permutation(order, n=None):
    n = len(order) if n is None else n
    if len(order) != n or sorted(order) != list(range(n)):
        raise ValueError("order is not a permutation of 0..n-1")


def tour_length(order: Sequence[int], dm) -> float:
    """Closed-cycle length of ``order`` under distance matrix ``dm``."""
    dm = np.asarray(dm, dtype=float)
    order = [int(v) for v in order]
    _check_permutation(order, dm.shape[0])
    idx = np.asarray(order)
    return float(dm[idx, np.roll(idx, -1)].sum())


def _tour_length_fast(order, D) -> float:
    total = 0.0
    prev = order[-1]
    for v in order:
        total += D[prev][v]
        prev = v
    return total


# --- validity -------------------------------------------------------------

def _valid(op: Op, n: int, i: int, j: int) -> bool:
    if op == Op.TWO_OPT:
        return 1 <= i < j <= n - 1
    if op == Op.SWAP:
        return 0 <= i < n and 0 <= j < n and i != j
    if op == Op.RELOCATE:
        return 0 <= i < n and 0 <= j < n and j != i and j != (i + 1) % n
    if op == Op.OR_OPT2:
        return (0 <= i <= n - 2 and 0 <= j < n
                and j not in (i, i + 1, (i + 2) % n))
    return False


def check_move(m: Move, n: int) -> Move:
    m = Move(Op.parse(m[0]), int(m[1]), int(m[2]))
    if m.op == Op.SWAP and m.i == m.j and 0 <= m.i < n:
        return m  # legal no-op, never drawn by the sampler
    if n < 3 or not _valid(m.op, n, m.i, m.j):
        raise ValueError(f"invalid move {m} for a tour of {n} sites")
    return m


# --- deltas ---------------------------------------------------------------

def _delta(op, order, D, n, i, j) -> float:
    if op == 0:  # two-opt
        a, b, c, d = order[i - 1], order[i], order[j], order[(j + 1) % n]
        return D[a][c] + D[b][d] - D[a][b] - D[c][d]
    if op == 1:  # swap
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        x, y = order[i], order[j]
        if j == i + 1:
            a, d = order[i - 1], order[(j + 1) % n]
            return D[a][y] + D[x][d] - D[a][x] - D[y][d]
        if i == 0 and j == n - 1:
            # y precedes x cyclically
            a, d = order[n - 2], order[1]
            return D[a][x] + D[y][d] - D[a][y] - D[x][d]
        pi, ni = order[i - 1], order[i + 1]
        pj, nj = order[j - 1], order[(j + 1) % n]
        return (D[pi][y] + D[y][ni] + D[pj][x] + D[x][nj]
                - D[pi][x] - D[x][ni] - D[pj][y] - D[y][nj])
    if op == 2:  # relocate
        a, e, c = order[i - 1], order[i], order[(i + 1) % n]
        p, q = order[j - 1], order[j]
        return D[a][c] - D[a][e] - D[e][c] + D[p][e] + D[e][q] - D[p][q]
    # or-opt-2
    a, e1, e2, c = order[i - 1], order[i], order[i + 1], order[(i + 2) % n]
    p, q = order[j - 1], order[j]
    return D[a][c] - D[a][e1] - D[e2][c] + D[p][e1] + D[e2][q] - D[p][q]


def _apply(op, order: list, i, j) -> list:
    if op == 0:
        return order[:i] + order[i:j + 1][::-1] + order[j + 1:]
    if op == 1:
        out = list(order)
        out[i], out[j] = out[j], out[i]
        return out
    if op == 2:
        e = order[i]
        if j > i:
            return order[:i] + order[i + 1:j] + [e] + order[j:]
        return order[:j] + [e] + order[j:i] + order[i + 1:]
    blk = order[i:i + 2]
    if j > i:
        return order[:i] + order[i + 2:j] + blk + order[j:]
    return order[:j] + blk + order[j:i] + order[i + 2:]


def move_delta(tour: Tour, m: Move, dm) -> float:
    """Length change of applying ``m``, from the handful of edges it touches."""
    n = tour.n
    m = check_move(m, n)
    return float(_delta(int(m.op), tour.order, dm, n, m.i, m.j))


def apply_move(tour: Tour, m: Move, dm) -> Tour:
    """Return a new tour with ``m`` applied; ``tour`` is left untouched."""
    n = tour.n
    m = check_move(m, n)
    delta = _delta(int(m.op), tour.order, dm, n, m.i, m.j)
    new_order = _apply(int(m.op), list(tour.order), m.i, m.j)
    return Tour(tuple(new_order), tour.length + float(delta))


# --- sampling -------------------------------------------------------------

def _skip(k: int, excluded) -> int:
    """k-th (0-based) integer that is not in the sorted ``excluded`` list."""
    for e in excluded:
        if k >= e:
            k += 1
        else:
            break
    return k


def _draw_move(op, n, u1, u2):
    """Map two uniforms in [0, 1) to a uniformly random valid move."""
    if op == 0:
        i = 1 + int(u1 * (n - 1))
        j = 1 + int(u2 * (n - 2))
        if j >= i:
            j += 1
        return (i, j) if i < j else (j, i)
    if op == 1:
        i = int(u1 * n)
        j = int(u2 * (n - 1))
        if j >= i:
            j += 1
        return i, j
    if op == 2:
        i = int(u1 * n)
        k = int(u2 * (n - 2))
        excluded = (0, n - 1) if i == n - 1 else (i, i + 1)
        return i, _skip(k, excluded)
    i = int(u1 * (n - 1))
    k = int(u2 * (n - 3))
    excluded = sorted({i, i + 1, (i + 2) % n})
    return i, _skip(k, excluded)


def _sample_best(op, order, D, n, u, pool=POOL_SIZE):
    """Best of ``pool`` moves drawn from the uniforms ``u``; ties keep the first."""
    best_i = best_j = -1
    best = np.inf
    for k in range(pool):
        i, j = _draw_move(op, n, u[2 * k], u[2 * k + 1])
        d = _delta(op, order, D, n, i, j)
        if d < best:
            best, best_i, best_j = d, i, j
    return best_i, best_j, best


def sample_candidate(op, tour: Tour, dm, rng, pool: int = POOL_SIZE):
    """Draw ``pool`` random moves of type ``op`` and return the best one.

    Consumes exactly ``2 * pool`` uniforms from ``rng.random`` per call,
    whatever the operator. Returns ``(Move, delta)``.
    """
    op = Op.parse(op)
    n = tour.n
    if n < MIN_SITES:
        raise ValueError(f"candidate sampling needs n >= {MIN_SITES}, got {n}")
    u = rng.random(DRAWS_PER_MOVE * pool)
    i, j, d = _sample_best(int(op), tour.order, dm, n, u, pool)
    return Move(op, i, j), float(d)


def double_bridge(order: Sequence[int], cuts) -> list:
    """Classic 4-opt perturbation; ``cuts`` are three positions 0 < a < b < c < n."""
    a, b, c = cuts
    order = list(order)
    return order[:a] + order[b:c] + order[a:b] + order[c:]
