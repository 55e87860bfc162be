"""Nearest-neighbor construction."""

from __future__ import annotations

import numpy as np

from .tour import Tour, tour_length


def nearest_neighbor_tour(dm, start: int = 0) -> Tour:
    """Greedy chain from ``start``; ties go to the lowest site index."""
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[0]
    if not 0 <= start < n:
        raise ValueError(f"start {start} out of range for {n} sites")
    visited = np.zeros(n, dtype=bool)
    order = [start]
    visited[start] = True
    cur = start
    for _ in range(n - 1):
        row = np.where(visited, np.inf, dm[cur])
        cur = int(np.argmin(row))
        visited[cur] = True
        order.append(cur)
    return Tour(tuple(order), tour_length(order, dm))


def _all_start_orders(dm: np.ndarray) -> np.ndarray:
    """Nearest-neighbor orders from every start at once, shape (n, n)."""
    n = dm.shape[0]
    starts = np.arange(n)
    orders = np.empty((n, n), dtype=np.int64)
    orders[:, 0] = starts
    visited = np.zeros((n, n), dtype=bool)
    visited[starts, starts] = True
    cur = starts.copy()
    for step in range(1, n):
        rows = np.where(visited, np.inf, dm[cur])
        cur = np.argmin(rows, axis=1)
        visited[starts, cur] = True
        orders[:, step] = cur
    return orders


def nn_tours_by_length(dm) -> list[Tour]:
    """Nearest-neighbor tours from every start, shortest first (stable in start)."""
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[0]
    if n < 2:
        raise ValueError("need at least 2 sites")
    orders = _all_start_orders(dm)
    tours = [Tour(tuple(int(v) for v in orders[s]), tour_length(orders[s], dm))
             for s in range(n)]
    return sorted(tours, key=lambda tour: tour.length)


def multi_start_nn(dm) -> Tour:
    """Shortest nearest-neighbor tour over all starts, lowest start on ties."""
    return nn_tours_by_length(dm)[0]
