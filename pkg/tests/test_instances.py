import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labhh import Instance, distance, distance_matrix, generate
from labhh.instances import GENERATED_FAMILIES, Family, instance_rng

from conftest import make_instance


@pytest.mark.parametrize("family", GENERATED_FAMILIES)
def test_generate_is_deterministic_and_in_unit_square(family):
    a = generate(family, 120, 5)
    b = generate(family, 120, 5)
    assert a.points.tobytes() == b.points.tobytes()
    assert a.n == len(a.points) == 120
    assert np.all((a.points >= 0) & (a.points <= 1))
    assert not np.array_equal(a.points, generate(family, 120, 6).points)


@pytest.mark.parametrize("family", GENERATED_FAMILIES)
def test_two_points_in_range(family):
    inst = generate(family, 2, 3)
    assert inst.points.shape == (2, 2)
    assert np.all((inst.points >= 0) & (inst.points <= 1))


def test_families_give_different_layouts():
    pts = {f: generate(f, 100, 1).points for f in GENERATED_FAMILIES}
    for f, g in [(a, b) for a in pts for b in pts if a < b]:
        assert not np.array_equal(pts[f], pts[g])


def test_too_small_instance_rejected():
    with pytest.raises(ValueError):
        generate("uniform", 1, 0)
    with pytest.raises(ValueError):
        generate("custom", 10, 0)


def test_family_aliases():
    assert Family.parse("grid-jitter") is Family.GRID_JITTER
    assert Family.parse("MixedDensity") is Family.MIXED_DENSITY
    with pytest.raises(ValueError):
        Family.parse("spiral")


def test_uniform_mean_nn_distance_matches_poisson_expectation():
    # For a homogeneous Poisson process of intensity n on the unit square the
    # expected nearest-neighbor distance is 1 / (2 sqrt(n)).
    n = 1000
    means = []
    for seed in range(50):
        dm = distance_matrix(generate("uniform", n, seed)) + np.diag(np.full(n, np.inf))
        means.append(dm.min(axis=1).mean())
    expected = 0.5 / math.sqrt(n)
    assert abs(np.mean(means) - expected) / expected < 0.15


@pytest.mark.parametrize("n", [10, 25, 60, 200])
def test_clustered_has_at_least_two_nonempty_clusters(n):
    k = max(2, int(math.floor(n / 25 + 0.5)))
    for seed in range(100):
        inst = generate("clustered", n, seed)
        # regenerate the centers from the same stream
        centers = 0.1 + 0.8 * instance_rng("clustered", n, seed).random((k, 2))
        d = np.linalg.norm(inst.points[:, None, :] - centers[None, :, :], axis=2)
        assert len(np.unique(d.argmin(axis=1))) >= 2


@pytest.mark.parametrize("n", [50, 100, 200])
def test_corridor_is_a_thin_strip(n):
    for seed in range(20):
        assert generate("corridor", n, seed).points[:, 1].std(ddof=1) < 0.1


def test_grid_jitter_uses_distinct_cells():
    n = 100
    inst = generate("grid_jitter", n, 4)
    g = math.ceil(math.sqrt(n))
    cells = set(map(tuple, np.floor(inst.points * g).astype(int)))
    assert len(cells) == n


def test_mixed_density_splits_half_uniform():
    inst = generate("mixed_density", 101, 2)
    assert inst.n == 101


def test_distance_examples():
    assert distance((0, 0), (0, 0)) == 0
    assert distance((0, 0), (1, 0)) == 1
    assert abs(distance((0, 0), (1, 1)) - math.sqrt(2)) < 1e-12


@given(st.tuples(st.floats(-5, 5), st.floats(-5, 5)),
       st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
def test_distance_symmetric_and_zero_iff_equal(p, q):
    assert distance(p, q) == distance(q, p)
    assert (distance(p, q) == 0) == (p == q)


def test_distance_matrix_square_corners(square):
    dm = distance_matrix(square)
    off = {round(v, 12) for v in dm[~np.eye(4, dtype=bool)]}
    assert off == {1.0, round(math.sqrt(2), 12)}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_distance_matrix_matches_pairwise(seed):
    inst = generate("uniform", 8, seed)
    dm = distance_matrix(inst)
    assert np.array_equal(dm, dm.T)
    assert np.all(np.diag(dm) == 0)
    for i in range(8):
        for j in range(8):
            assert abs(dm[i, j] - distance(inst.points[i], inst.points[j])) <= 1e-15
    # triangle inequality
    assert np.all(dm[:, None, :] <= dm[:, :, None] + dm[None, :, :] + 1e-12)


def test_instance_json_round_trip(tmp_path):
    inst = generate("clustered", 30, 9)
    path = tmp_path / "i.json"
    inst.save(path)
    back = Instance.load(path)
    assert back == inst
    assert back.id == inst.id and back.family is inst.family and back.seed == inst.seed
    data = json.loads(path.read_text())
    assert set(data) == {"id", "family", "n", "seed", "points"}


@pytest.mark.parametrize("patch", [
    {"n": 5},
    {"points": [[0.1, 0.2], [1.5, 0.3]], "n": 2},
    {"points": [[0.1, 0.2]], "n": 1},
])
def test_loader_validates(tmp_path, patch):
    data = generate("uniform", 3, 0).to_dict()
    data.update(patch)
    with pytest.raises(ValueError):
        Instance.from_dict(data)


def test_loader_missing_field():
    with pytest.raises(ValueError, match="missing"):
        Instance.from_dict({"id": "x", "family": "uniform", "n": 2})


def test_instance_is_immutable():
    inst = make_instance([[0, 0], [1, 1], [0, 1]])
    with pytest.raises(ValueError):
        inst.points[0, 0] = 3.0
