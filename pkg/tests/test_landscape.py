import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse.csgraph import minimum_spanning_tree

from labhh import LandscapeFeatures, StaticFeatures, distance_matrix, generate
from labhh.instances import GENERATED_FAMILIES
from labhh.landscape import mst_total_weight, static_features

from conftest import kruskal_weight, make_instance


def test_mst_collinear_chain():
    inst = make_instance([[0, 0], [0.5, 0], [1, 0]])
    assert mst_total_weight(inst, distance_matrix(inst)) == pytest.approx(1.0, abs=1e-12)


def test_mst_square(square):
    assert mst_total_weight(square, distance_matrix(square)) == pytest.approx(3.0, abs=1e-12)


def test_mst_needs_two_sites():
    with pytest.raises(ValueError):
        mst_total_weight(None, np.zeros((1, 1)))


def test_mst_matches_kruskal_and_scipy_n10():
    inst = generate("uniform", 10, 3)
    dm = distance_matrix(inst)
    prim = mst_total_weight(inst, dm)
    assert abs(prim - kruskal_weight(dm)) < 1e-9
    assert abs(prim - minimum_spanning_tree(dm).sum()) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 32), st.integers(0, 10**6), st.floats(-3, 3), st.floats(-3, 3))
def test_mst_invariant_under_permutation_and_translation(n, seed, dx, dy):
    pts = generate("clustered", n, seed).points
    perm = np.random.default_rng(seed).permutation(n)
    base = mst_total_weight(None, distance_matrix(pts))
    moved = pts[perm] + np.array([dx, dy])
    assert abs(mst_total_weight(None, distance_matrix(moved)) - base) < 1e-9


def test_size_norm_monotone():
    a = static_features(generate("uniform", 50, 1))
    b = static_features(generate("uniform", 200, 1))
    assert a.size_norm < b.size_norm
    assert a.size_norm == pytest.approx(math.log10(50) / 3)


def test_anisotropy_extremes(square):
    line = make_instance([[x, 0.5] for x in np.linspace(0, 1, 10)])
    assert static_features(line).anisotropy >= 0.99
    assert static_features(square).anisotropy == pytest.approx(0.0, abs=1e-12)


def test_uniform_nn_mean_density_normalized():
    # Poisson expectation 0.5 for the sqrt(n)-scaled mean NN distance; edges push it up a bit
    vals = [static_features(generate("uniform", 200, s)).nn_mean for s in range(20)]
    assert all(0.35 <= v <= 0.65 for v in vals)


def test_degenerate_points_give_zero_features():
    inst = make_instance([[0.3, 0.3]] * 5)
    f = static_features(inst)
    assert f.nn_mean == 0 and f.anisotropy == 0
    assert f.nn_dispersion == 0 and f.radial_dispersion == 0 and f.mst_per_node == 0


def test_needs_three_sites():
    with pytest.raises(ValueError):
        static_features(make_instance([[0, 0], [1, 1]]))


@pytest.mark.parametrize("family", GENERATED_FAMILIES)
@pytest.mark.parametrize("n", [50, 100, 200])
def test_features_bounded_and_pure(family, n):
    inst = generate(family, n, 2)
    f = static_features(inst)
    arr = f.as_array()
    assert arr.shape == (6,)
    assert np.all(np.isfinite(arr)) and np.all((arr >= 0) & (arr <= 2))
    assert 0 <= f.anisotropy <= 1
    assert static_features(inst) == f


def test_corridor_is_anisotropic():
    assert static_features(generate("corridor", 100, 0)).anisotropy > 0.9
    assert static_features(generate("uniform", 100, 0)).anisotropy < 0.5


def test_transformer_api():
    insts = [generate(f, 60, 1) for f in GENERATED_FAMILIES]
    tr = LandscapeFeatures()
    X = tr.fit_transform(insts)
    assert X.shape == (5, 6)
    assert list(tr.get_feature_names_out()) == list(StaticFeatures.names())
    assert np.allclose(X[0], static_features(insts[0]).as_array())
    assert tr.get_params() == {}
    with pytest.raises(TypeError):
        tr.transform([np.zeros((5, 2))])
