"""Both kernel backends must agree; the default one is whatever the env picked."""

import numpy as np
import pytest

from granular import _kernels
from granular._kernels import numpy_impl

numba_impl = pytest.importorskip("granular._kernels.numba_impl")


def test_backend_flag_is_known():
    assert _kernels.BACKEND in ("numba", "numpy")


def test_som_train_backends_agree(rng):
    X = rng.uniform(size=(25, 4))
    W0 = rng.uniform(size=(6, 4))
    orders = np.stack([rng.permutation(25) for _ in range(30)]).astype(np.int64)
    alphas = np.linspace(0.5, 0.01, 30)
    radii = np.linspace(3.0, 0.0, 30)
    Wa, Wb = W0.copy(), W0.copy()
    numpy_impl.som_train(X, Wa, orders, alphas, radii)
    numba_impl.som_train(X, Wb, orders, alphas, radii)
    np.testing.assert_allclose(Wa, Wb, rtol=1e-10, atol=1e-12)


def test_nearest_backends_agree_and_break_ties_low(rng):
    X = rng.uniform(size=(50, 3))
    W = rng.uniform(size=(7, 3))
    np.testing.assert_array_equal(numpy_impl.nearest(X, W), numba_impl.nearest(X, W))
    W2 = np.array([[0.0], [2.0], [2.0]])
    X2 = np.array([[1.0], [2.0]])
    assert numpy_impl.nearest(X2, W2).tolist() == [0, 1]
    assert numba_impl.nearest(X2, W2).tolist() == [0, 1]


def test_potentials_backends_agree(rng):
    X = rng.uniform(size=(40, 5))
    np.testing.assert_allclose(
        numpy_impl.potentials(X, 16.0), numba_impl.potentials(X, 16.0), rtol=1e-12
    )


def test_discern_masks_backends_agree(rng):
    C = rng.integers(1, 4, size=(15, 6)).astype(np.int64)
    d = rng.integers(1, 3, size=15).astype(np.int64)
    a = numpy_impl.discern_masks(C, d)
    b = numba_impl.discern_masks(C, d)
    for u, v in zip(a, b):
        np.testing.assert_array_equal(u, v)


def test_hitting_table_backends_agree(rng):
    clauses = np.unique(rng.integers(1, 1 << 8, size=12)).astype(np.int64)
    np.testing.assert_array_equal(
        numpy_impl.hitting_table(clauses, 8), numba_impl.hitting_table(clauses, 8)
    )
    empty = np.zeros(0, dtype=np.int64)
    assert numpy_impl.hitting_table(empty, 3).all()
    assert numba_impl.hitting_table(empty, 3).all()
