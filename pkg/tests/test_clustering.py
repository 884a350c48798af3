import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from granular import DimensionMismatch, EmptyData
from granular.clustering import (
    ClusterSet,
    SubtractiveConfig,
    initial_potentials,
    minmax_scale,
    subtractive_cluster,
)
import oracles


def test_config_validation():
    for bad in ({"radius": 0}, {"squash": 1.0}, {"accept_ratio": 1.0},
                {"reject_ratio": 0.6}, {"reject_ratio": 0.0}):
        with pytest.raises(ValueError):
            SubtractiveConfig(**bad)


def test_minmax_scale():
    Z, b = minmax_scale([[1.0, 5.0], [3.0, 5.0], [2.0, 5.0]])
    np.testing.assert_array_equal(Z, [[0, 0], [1, 0], [0.5, 0]])
    np.testing.assert_array_equal(b, [[1, 3], [5, 5]])


def test_potentials_match_brute_force(rng):
    X = rng.uniform(size=(15, 3))
    np.testing.assert_allclose(
        initial_potentials(X, 0.5), oracles.potentials(X.tolist(), 0.5), rtol=1e-12
    )


def test_single_point():
    cs = subtractive_cluster([[0.3, 0.7]])
    assert len(cs) == 1
    np.testing.assert_array_equal(cs.centers, [[0.3, 0.7]])


def test_two_far_clumps(rng):
    a = rng.normal([0.05, 0.05], 0.01, (10, 2))
    b = rng.normal([0.95, 0.95], 0.01, (10, 2))
    X = np.vstack([a, b])
    cs = subtractive_cluster(X, max_clusters=4)
    assert len(cs) == 2
    owners = {int(np.argmin([np.linalg.norm(c - a.mean(0)), np.linalg.norm(c - b.mean(0))]))
              for c in cs.centers}
    assert owners == {0, 1}


def test_max_clusters_one_is_global_max(rng):
    X = rng.uniform(size=(30, 2))
    cs = subtractive_cluster(X, max_clusters=1)
    best = oracles.argmax_first(oracles.potentials(X.tolist(), 0.5))
    assert cs.indices == (best,)


def test_tie_goes_to_lowest_index():
    X = np.array([[0.0], [1.0]])
    assert subtractive_cluster(X, max_clusters=1).indices == (0,)


def test_errors():
    with pytest.raises(EmptyData):
        subtractive_cluster(np.zeros((0, 2)))
    with pytest.raises(DimensionMismatch):
        subtractive_cluster(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        subtractive_cluster([[0.1]], max_clusters=0)


def test_radius_shrink_never_loses_centres(bundled):
    Z, _ = minmax_scale(np.column_stack([bundled.X, bundled.y]))
    counts = [len(subtractive_cluster(Z, SubtractiveConfig(radius=r))) for r in (0.7, 0.5, 0.3)]
    assert counts == sorted(counts)


def test_json_round_trip(rng):
    cs = subtractive_cluster(rng.uniform(size=(12, 2)))
    doc = cs.to_json()
    again = ClusterSet.from_json(doc)
    np.testing.assert_array_equal(again.centers, cs.centers)
    assert again.indices == cs.indices and again.config == cs.config


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_cluster_invariants(seed, limit):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(int(rng.integers(1, 25)), int(rng.integers(1, 4))))
    cs = subtractive_cluster(X, max_clusters=limit)
    assert 1 <= len(cs) <= min(limit, len(X))
    assert cs.indices[0] == oracles.argmax_first(oracles.potentials(X.tolist(), 0.5))
    assert len(set(cs.indices)) == len(cs.indices)
    for k, i in enumerate(cs.indices):
        np.testing.assert_array_equal(cs.centers[k], X[i])
    assert np.all(cs.potentials > 0)
    assert np.all(np.diff(cs.potentials) <= 1e-12)
