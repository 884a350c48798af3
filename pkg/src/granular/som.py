"""One-dimensional Kohonen map used for crisp granulation.

Inputs are min-max scaled to [0, 1] per dimension inside the model, with the
scaling frozen at training time. Weights live in the scaled space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, EmptyData


@dataclass(frozen=True)
class SomConfig:
    n_neurons: int
    epochs: int = 100
    learning_rate_initial: float = 0.5
    learning_rate_final: float = 0.01
    neighborhood_radius_initial: float | None = None  # None -> n_neurons / 2
    seed: int = 0

    def __post_init__(self):
        if self.n_neurons < 1:
            raise ValueError("n_neurons must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0.0 < self.learning_rate_initial <= 1.0:
            raise ValueError("learning_rate_initial must lie in (0, 1]")
        if not 0.0 < self.learning_rate_final <= self.learning_rate_initial:
            raise ValueError("learning_rate_final must lie in (0, learning_rate_initial]")
        if self.neighborhood_radius_initial is not None and self.neighborhood_radius_initial < 0:
            raise ValueError("neighborhood_radius_initial must be >= 0")

    @property
    def radius(self) -> float:
        if self.neighborhood_radius_initial is None:
            return self.n_neurons / 2.0
        return float(self.neighborhood_radius_initial)

    def schedules(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-epoch learning rate and neighbourhood radius, both linear."""
        frac = np.linspace(0.0, 1.0, self.epochs) if self.epochs > 1 else np.zeros(1)
        a0, a1 = self.learning_rate_initial, self.learning_rate_final
        return a0 + (a1 - a0) * frac, self.radius * (1.0 - frac)


@dataclass(frozen=True)
class SomModel:
    weights: np.ndarray  # (n_neurons, input_dim), scaled space
    normalization: np.ndarray  # (input_dim, 2) rows of (min, max)

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64, ndmin=2)
        norm = np.array(self.normalization, dtype=np.float64).reshape(-1, 2)
        if w.shape[1] != norm.shape[0]:
            raise DimensionMismatch("weights and normalization disagree on input_dim")
        if np.any(norm[:, 1] < norm[:, 0]):
            raise ValueError("normalization requires max >= min per dimension")
        w.setflags(write=False)
        norm.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "normalization", norm)

    @property
    def input_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def n_neurons(self) -> int:
        return self.weights.shape[0]

    def scale(self, X) -> np.ndarray:
        X = _as_matrix(X)
        if X.shape[1] != self.input_dim:
            raise DimensionMismatch(f"expected {self.input_dim} components, got {X.shape[1]}")
        lo, hi = self.normalization[:, 0], self.normalization[:, 1]
        span = np.where(hi > lo, hi - lo, 1.0)
        return (X - lo) / span

    def unscale(self, Z) -> np.ndarray:
        lo, hi = self.normalization[:, 0], self.normalization[:, 1]
        span = np.where(hi > lo, hi - lo, 1.0)
        return np.asarray(Z) * span + lo

    def prototypes(self) -> np.ndarray:
        """Weight vectors mapped back to input units."""
        return self.unscale(self.weights)

    def assign_many(self, X) -> np.ndarray:
        return _kernels.nearest(np.ascontiguousarray(self.scale(X)), self.weights)

    def to_json(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "weights": self.weights.tolist(),
            "normalization": self.normalization.tolist(),
        }

    @classmethod
    def from_json(cls, doc) -> "SomModel":
        model = cls(np.array(doc["weights"], dtype=np.float64), np.array(doc["normalization"]))
        if model.input_dim != doc.get("input_dim", model.input_dim):
            raise DimensionMismatch("input_dim does not match weight vectors")
        return model


def _as_matrix(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        X = data.astype(np.float64, copy=False)
    else:
        rows = [np.atleast_1d(np.asarray(r, dtype=np.float64)) for r in data]
        if rows and len({r.shape for r in rows}) > 1:
            raise DimensionMismatch("data vectors differ in dimensionality")
        X = np.array(rows, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.size == 0 or X.shape[0] == 0:
        raise EmptyData("no data vectors")
    return X


def init_som(data, config: SomConfig) -> SomModel:
    """Untrained map: weights drawn uniformly inside the scaled data range."""
    X = _as_matrix(data)
    lo, hi = X.min(axis=0), X.max(axis=0)
    norm = np.column_stack([lo, hi])
    upper = np.where(hi > lo, 1.0, 0.0)
    rng = np.random.default_rng(config.seed)
    W = rng.uniform(0.0, 1.0, size=(config.n_neurons, X.shape[1])) * upper
    return SomModel(W, norm)


def train_som(data, config: SomConfig) -> SomModel:
    """Train a 1-D chain by sequential winner-take-all updates.

    Each epoch visits the samples in a seeded random order. For sample ``x``
    the winner is the nearest neuron (lowest index on ties) and every neuron
    ``j`` moves by ``alpha * h(j) * (x - w_j)`` with a Gaussian neighbourhood
    ``h`` over chain distance to the winner. Learning rate and radius decay
    linearly; at radius zero only the winner moves.
    """
    X = _as_matrix(data)
    model = init_som(X, config)
    Z = np.ascontiguousarray(model.scale(X))
    W = np.array(model.weights)
    rng = np.random.default_rng([config.seed, 1])
    orders = np.stack([rng.permutation(len(Z)) for _ in range(config.epochs)]).astype(np.int64)
    alphas, radii = config.schedules()
    _kernels.som_train(Z, W, orders, alphas, radii)
    if not np.all(np.isfinite(W)):
        raise FloatingPointError("SOM training produced non-finite weights")
    return SomModel(W, model.normalization)


def assign(model: SomModel, x) -> int:
    """Index of the neuron nearest to ``x`` (lowest index on ties)."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim != 1 or x.shape[0] != model.input_dim:
        raise DimensionMismatch(f"expected {model.input_dim} components")
    return int(model.assign_many(x[None, :])[0])


def quantization_error(model: SomModel, data) -> float:
    """Mean Euclidean distance from each scaled point to its winner."""
    Z = model.scale(_as_matrix(data))
    win = _kernels.nearest(np.ascontiguousarray(Z), model.weights)
    return float(np.mean(np.linalg.norm(Z - model.weights[win], axis=1)))


def sort_neurons(model: SomModel) -> SomModel:
    """Reorder neurons by ascending weight (first dimension, then the rest).

    Stable, so equal weights keep their original relative order.
    """
    keys = tuple(model.weights[:, d] for d in reversed(range(model.input_dim)))
    order = np.lexsort(keys)
    return SomModel(model.weights[order], model.normalization)


def fit_discretizer(column, n_categories: int, seed: int = 0, epochs: int = 100) -> SomModel:
    """Scalar SOM with neurons sorted so neuron ``k`` is category ``k + 1``."""
    values = np.asarray(column, dtype=np.float64).ravel()
    if values.size == 0:
        raise EmptyData("cannot discretize an empty column")
    if n_categories < 1:
        raise ValueError("n_categories must be >= 1")
    model = train_som(values[:, None], SomConfig(n_categories, epochs=epochs, seed=seed))
    return sort_neurons(model)


def apply_discretizer(model: SomModel, column) -> np.ndarray:
    values = np.asarray(column, dtype=np.float64).ravel()
    return model.assign_many(values[:, None]) + 1


def discretize_attribute(column, n_categories: int, seed: int = 0) -> list[int]:
    """Ordinal codes ``1..n_categories`` for a numeric column.

    Category 1 is the lowest-weight neuron, so the coding is monotone in the
    column values.
    """
    model = fit_discretizer(column, n_categories, seed=seed)
    return apply_discretizer(model, column).tolist()
