import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from granular import DimensionMismatch, EmptyData
from granular.som import (
    SomConfig,
    SomModel,
    assign,
    discretize_attribute,
    fit_discretizer,
    init_som,
    quantization_error,
    train_som,
)


def test_config_defaults_and_validation():
    cfg = SomConfig(6)
    assert cfg.radius == 3.0
    alphas, radii = cfg.schedules()
    assert alphas[0] == 0.5 and alphas[-1] == pytest.approx(0.01)
    assert radii[0] == 3.0 and radii[-1] == 0.0
    for bad in ({"n_neurons": 0}, {"n_neurons": 2, "epochs": 0},
                {"n_neurons": 2, "learning_rate_final": 0.6},
                {"n_neurons": 2, "neighborhood_radius_initial": -1}):
        with pytest.raises(ValueError):
            SomConfig(**bad)


def test_single_neuron_moves_toward_mean(rng):
    X = rng.normal(size=(40, 3))
    cfg = SomConfig(1, epochs=200, seed=1)
    before = quantization_error(init_som(X, cfg), X)
    model = train_som(X, cfg)
    assert quantization_error(model, X) <= before
    mean = model.scale(X).mean(axis=0)
    np.testing.assert_allclose(model.weights[0], mean, atol=0.1)


@pytest.mark.parametrize("n", [2, 3, 5, 7])
@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_evenly_spaced_points_claim_distinct_winners(n, seed):
    rng = np.random.default_rng(seed)
    X = np.arange(n)[:, None] + rng.uniform(-0.1, 0.1, (n, 1))
    model = train_som(X, SomConfig(n, epochs=200, seed=seed))
    # exhaustive winner check, independent of the kernel
    Z = model.scale(X)
    winners = [int(np.argmin([abs(z[0] - w[0]) for w in model.weights])) for z in Z]
    assert sorted(winners) == list(range(n))


def test_training_is_deterministic(bundled):
    cfg = SomConfig(8, seed=5)
    a, b = train_som(bundled.X, cfg), train_som(bundled.X, cfg)
    assert np.array_equal(a.weights, b.weights)
    c = train_som(bundled.X, SomConfig(8, seed=6))
    assert not np.array_equal(a.weights, c.weights)


def test_assign_exact_tie_and_range():
    model = SomModel(np.array([[0.0], [0.25], [0.75]]), np.array([[0.0, 1.0]]))
    assert assign(model, [0.25]) == 1
    assert assign(model, [0.5]) == 1  # equidistant from neurons 1 and 2
    for x in np.linspace(-1, 2, 31):
        assert 0 <= assign(model, [x]) < 3
        assert assign(model, [x]) == assign(model, [x])
    with pytest.raises(DimensionMismatch):
        assign(model, [0.1, 0.2])


def test_quantization_error_hand_cases():
    W = np.array([[0.1, 0.2], [0.7, 0.9]])
    model = SomModel(W, np.array([[0.0, 1.0], [0.0, 1.0]]))
    assert quantization_error(model, W) == 0.0
    one = SomModel(np.array([[0.0, 0.0]]), np.array([[0.0, 1.0], [0.0, 1.0]]))
    assert quantization_error(one, [[0.3, 0.4]]) == pytest.approx(0.5)
    with pytest.raises(EmptyData):
        quantization_error(model, np.zeros((0, 2)))


def test_training_lowers_quantization_error_on_bundled(bundled):
    cfg = SomConfig(10, seed=3)
    assert quantization_error(train_som(bundled.X, cfg), bundled.X) <= quantization_error(
        init_som(bundled.X, cfg), bundled.X
    )


def test_row_order_barely_moves_quantization_error(bundled):
    cfg = SomConfig(10, seed=3)
    base = quantization_error(train_som(bundled.X, cfg), bundled.X)
    perm = np.random.default_rng(0).permutation(len(bundled))
    shuffled = quantization_error(train_som(bundled.X[perm], cfg), bundled.X)
    assert abs(shuffled - base) <= 0.1 * base


def test_bad_inputs():
    with pytest.raises(EmptyData):
        train_som([], SomConfig(2))
    with pytest.raises(DimensionMismatch):
        train_som([[1.0, 2.0], [3.0]], SomConfig(2))
    with pytest.raises(EmptyData):
        discretize_attribute([], 3)


def test_json_round_trip(bundled):
    model = train_som(bundled.X, SomConfig(4, epochs=10))
    doc = model.to_json()
    assert set(doc) == {"input_dim", "weights", "normalization"}
    again = SomModel.from_json(doc)
    assert np.array_equal(again.weights, model.weights)
    assert np.array_equal(again.normalization, model.normalization)


def test_clumps_follow_nearest_centre_and_order(rng):
    col = np.concatenate([1 + rng.normal(0, 0.1, 8), 10 + rng.normal(0, 0.5, 8),
                          100 + rng.normal(0, 2, 8)])
    model = fit_discretizer(col, 3, seed=0)
    codes = discretize_attribute(col, 3, seed=0)
    centres = model.prototypes()[:, 0]
    assert np.all(np.diff(centres) >= 0)
    brute = [1 + int(np.argmin(np.abs(centres - v))) for v in col]
    assert codes == brute
    assert codes[0] == 1 and codes[-1] == 3
    assert max(codes[:16]) < min(codes[16:])


def test_degenerate_columns():
    assert discretize_attribute([4.2] * 7, 3) == [1] * 7
    assert discretize_attribute([1.0, 5.0, 3.0], 1) == [1, 1, 1]


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=25),
    st.integers(1, 5),
    st.integers(0, 2**16),
)
def test_discretization_is_monotone(values, k, seed):
    codes = discretize_attribute(values, k, seed=seed)
    assert all(1 <= c <= k for c in codes)
    pairs = sorted(zip(values, codes))
    assert all(a[1] <= b[1] for a, b in zip(pairs, pairs[1:]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**16))
def test_weights_stay_finite(n, seed):
    X = np.random.default_rng(seed).normal(scale=1e3, size=(12, 3))
    assert np.all(np.isfinite(train_som(X, SomConfig(n, epochs=20, seed=seed)).weights))
