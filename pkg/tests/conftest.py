import itertools

import numpy as np
import pytest

from labhh import Instance, distance_matrix, generate
from labhh.instances import Family


def brute_force_optimum(dm):
    """Exact shortest tour by enumerating all orders with site 0 fixed first."""
    dm = np.asarray(dm)
    n = dm.shape[0]
    rest = np.array(list(itertools.permutations(range(1, n))))
    zeros = np.zeros((len(rest), 1), dtype=int)
    tours = np.hstack([zeros, rest])
    lengths = dm[tours, np.roll(tours, -1, axis=1)].sum(axis=1)
    k = int(np.argmin(lengths))
    return float(lengths[k]), tours[k]


def kruskal_weight(dm):
    """MST weight via Kruskal with a plain union-find."""
    dm = np.asarray(dm)
    n = dm.shape[0]
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edges = sorted((dm[i, j], i, j) for i in range(n) for j in range(i + 1, n))
    total, used = 0.0, 0
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            total += w
            used += 1
            if used == n - 1:
                break
    return total


def make_instance(points, family=Family.CUSTOM, iid="test"):
    pts = np.asarray(points, dtype=float)
    return Instance(id=iid, family=family, n=len(pts), seed=0, points=pts)


@pytest.fixture
def square():
    return make_instance([[0, 0], [1, 0], [1, 1], [0, 1]], iid="square")


@pytest.fixture
def hexagon():
    ang = np.arange(6) * np.pi / 3
    return make_instance(0.5 + 0.4 * np.column_stack([np.cos(ang), np.sin(ang)]), iid="hex")


@pytest.fixture
def uniform50():
    inst = generate("uniform", 50, 11)
    return inst, distance_matrix(inst)


# One summary line per acceptance criterion, printed at the end of the session.
ACCEPTANCE_LINES = {}


def record_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
