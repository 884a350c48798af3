"""First-order Takagi-Sugeno-Kang neuro-fuzzy model.

Premises are Gaussian membership functions over inputs min-max scaled with
the model's stored bounds; rule firing strength is the product of the
memberships. Consequents are linear in the raw (unscaled) inputs, so a rule
``f(x) = p . x + b`` reads in the data's own units.

Training is the usual hybrid scheme: least squares for the consequents with
premises frozen, then one gradient step on the premises with consequents
frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .clustering import ClusterSet
from .errors import DimensionMismatch, EmptyClusterSet, EmptyData, SingularSystem

SIGMA_MIN = 1e-4
RIDGE = 1e-8


@dataclass(frozen=True)
class GaussianMf:
    c: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "sigma", max(float(self.sigma), SIGMA_MIN))

    def __call__(self, u):
        return np.exp(-((np.asarray(u) - self.c) ** 2) / (2.0 * self.sigma**2))


@dataclass(frozen=True)
class TskRule:
    premises: tuple[GaussianMf, ...]
    consequent: tuple[float, ...]  # p_1..p_d, bias


@dataclass(frozen=True)
class TskModel:
    """Rules stored as arrays for vectorised evaluation.

    ``centers`` and ``sigmas`` are ``(rules, inputs)`` in scaled units;
    ``consequents`` is ``(rules, inputs + 1)`` with the bias last.
    """

    centers: np.ndarray
    sigmas: np.ndarray
    consequents: np.ndarray
    normalization: np.ndarray  # (inputs, 2) of (min, max)

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.float64, ndmin=2)
        s = np.maximum(np.array(self.sigmas, dtype=np.float64, ndmin=2), SIGMA_MIN)
        q = np.array(self.consequents, dtype=np.float64, ndmin=2)
        norm = np.array(self.normalization, dtype=np.float64).reshape(-1, 2)
        k, d = c.shape
        if k < 1:
            raise EmptyClusterSet("a TSK model needs at least one rule")
        if s.shape != (k, d) or q.shape != (k, d + 1) or norm.shape[0] != d:
            raise DimensionMismatch("rule parameter shapes disagree")
        for arr, name in ((c, "centers"), (s, "sigmas"), (q, "consequents"), (norm, "normalization")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def input_dim(self) -> int:
        return self.centers.shape[1]

    @property
    def n_rules(self) -> int:
        return self.centers.shape[0]

    @property
    def rules(self) -> tuple[TskRule, ...]:
        return tuple(
            TskRule(
                tuple(GaussianMf(float(c), float(s)) for c, s in zip(cr, sr)),
                tuple(float(v) for v in qr),
            )
            for cr, sr, qr in zip(self.centers, self.sigmas, self.consequents)
        )

    def scale(self, X) -> np.ndarray:
        lo, hi = self.normalization[:, 0], self.normalization[:, 1]
        return (X - lo) / np.where(hi > lo, hi - lo, 1.0)

    def premise_vector(self) -> np.ndarray:
        """All premise parameters: centres then widths, row-major."""
        return np.concatenate([self.centers.ravel(), self.sigmas.ravel()])

    def with_premises(self, theta) -> "TskModel":
        theta = np.asarray(theta, dtype=np.float64)
        n = self.centers.size
        return replace(
            self,
            centers=theta[:n].reshape(self.centers.shape),
            sigmas=theta[n:].reshape(self.sigmas.shape),
        )

    def to_json(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "normalization": self.normalization.tolist(),
            "rules": [
                {
                    "premises": [{"c": float(c), "sigma": float(s)} for c, s in zip(cr, sr)],
                    "consequent": qr.tolist(),
                }
                for cr, sr, qr in zip(self.centers, self.sigmas, self.consequents)
            ],
        }

    @classmethod
    def from_json(cls, doc) -> "TskModel":
        rules = doc["rules"]
        if not rules:
            raise EmptyClusterSet("model has no rules")
        model = cls(
            np.array([[p["c"] for p in r["premises"]] for r in rules]),
            np.array([[p["sigma"] for p in r["premises"]] for r in rules]),
            np.array([r["consequent"] for r in rules]),
            np.array(doc["normalization"]),
        )
        if model.input_dim != doc.get("input_dim", model.input_dim):
            raise DimensionMismatch("input_dim does not match premises")
        return model


def _as_xy(data) -> tuple[np.ndarray, np.ndarray]:
    """Accept ``(X, y)`` arrays or a sequence of ``(x, y)`` pairs."""
    if isinstance(data, tuple) and len(data) == 2 and np.ndim(data[1]) == 1 and np.ndim(data[0]) == 2:
        X, y = data
    else:
        pairs = list(data)
        if not pairs:
            raise EmptyData("no training pairs")
        X = [np.atleast_1d(p[0]) for p in pairs]
        y = [p[1] for p in pairs]
    X = np.array(X, dtype=np.float64, ndmin=2)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] == 0:
        raise EmptyData("no training pairs")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch("inputs and targets differ in length")
    return X, y


def init_from_clusters(clusters: ClusterSet, data, normalization=None) -> TskModel:
    """One rule per cluster centre.

    Premise centres are the centre coordinates over the input dimensions
    (clusters found in joint input-output space contribute their first
    ``d`` coordinates). Every width is ``radius / sqrt(8)``, matching the
    clustering kernel. Consequents start flat at the target mean.

    ``normalization`` defaults to the min/max of the training inputs and must
    be the scaling the clusters were computed in.
    """
    if len(clusters) == 0:
        raise EmptyClusterSet("no cluster centres")
    X, y = _as_xy(data)
    d = X.shape[1]
    centers = np.asarray(clusters.centers, dtype=np.float64)
    if centers.shape[1] not in (d, d + 1):
        raise DimensionMismatch(f"cluster centres have {centers.shape[1]} dims for {d} inputs")
    if normalization is None:
        normalization = np.column_stack([X.min(axis=0), X.max(axis=0)])
    k = centers.shape[0]
    sigmas = np.full((k, d), clusters.config.radius / np.sqrt(8.0))
    conseq = np.zeros((k, d + 1))
    conseq[:, -1] = y.mean()
    return TskModel(centers[:, :d], sigmas, conseq, normalization)


def _log_strengths(model: TskModel, X: np.ndarray) -> np.ndarray:
    U = model.scale(X)
    diff = U[:, None, :] - model.centers[None, :, :]
    return -((diff**2) / (2.0 * model.sigmas[None] ** 2)).sum(axis=2)


def _normalized_strengths(model: TskModel, X: np.ndarray) -> np.ndarray:
    """Firing strengths normalised to sum to one per sample.

    When every strength underflows, all weight goes to the rule with the
    largest log-strength.
    """
    logw = _log_strengths(model, X)
    w = np.exp(logw)
    total = w.sum(axis=1)
    out = np.empty_like(w)
    ok = total > 0.0
    out[ok] = w[ok] / total[ok, None]
    if not np.all(ok):
        dead = ~ok
        out[dead] = 0.0
        out[np.flatnonzero(dead), np.argmax(logw[dead], axis=1)] = 1.0
    return out


def _rule_outputs(model: TskModel, X: np.ndarray) -> np.ndarray:
    return X @ model.consequents[:, :-1].T + model.consequents[:, -1]


def predict(model: TskModel, X) -> np.ndarray:
    X = np.array(X, dtype=np.float64, ndmin=2)
    if X.shape[1] != model.input_dim:
        raise DimensionMismatch(f"expected {model.input_dim} inputs, got {X.shape[1]}")
    wbar = _normalized_strengths(model, X)
    return (wbar * _rule_outputs(model, X)).sum(axis=1)


def forward(model: TskModel, x) -> float:
    """Model output for a single raw input vector."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim != 1 or x.shape[0] != model.input_dim:
        raise DimensionMismatch(f"expected {model.input_dim} inputs")
    return float(predict(model, x[None, :])[0])


def premise_gradient(model: TskModel, x, y_target: float) -> np.ndarray:
    """Gradient of ``(forward(x) - y_target)^2`` over ``premise_vector()``."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim != 1 or x.shape[0] != model.input_dim:
        raise DimensionMismatch(f"expected {model.input_dim} inputs")
    return _batch_gradient(model, x[None, :], np.array([float(y_target)]))[0]


def _batch_gradient(model: TskModel, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-sample premise gradients, shape ``(n, 2 * rules * inputs)``."""
    U = model.scale(X)
    wbar = _normalized_strengths(model, X)
    f = _rule_outputs(model, X)
    yhat = (wbar * f).sum(axis=1)
    logw = _log_strengths(model, X)
    live = np.exp(logw).sum(axis=1) > 0.0  # underflow fallback is piecewise constant
    # d yhat / d log w_k = wbar_k (f_k - yhat)
    g = 2.0 * (yhat - y)[:, None] * wbar * (f - yhat[:, None])
    g[~live] = 0.0
    diff = U[:, None, :] - model.centers[None]
    s = model.sigmas[None]
    d_c = g[:, :, None] * diff / s**2
    d_s = g[:, :, None] * diff**2 / s**3
    n = X.shape[0]
    return np.concatenate([d_c.reshape(n, -1), d_s.reshape(n, -1)], axis=1)


def _design(model: TskModel, X: np.ndarray) -> np.ndarray:
    wbar = _normalized_strengths(model, X)
    Xa = np.column_stack([X, np.ones(len(X))])
    return (wbar[:, :, None] * Xa[:, None, :]).reshape(len(X), -1)


def fit_consequents(model: TskModel, X: np.ndarray, y: np.ndarray) -> TskModel:
    """Ridge-regularised least squares for all consequents at once."""
    A = _design(model, X)
    p = A.shape[1]
    lhs = np.vstack([A, np.sqrt(RIDGE) * np.eye(p)])
    rhs = np.concatenate([y, np.zeros(p)])
    try:
        theta, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"least-squares solve failed: {exc}") from exc
    if not np.all(np.isfinite(theta)):
        raise SingularSystem("least-squares solve produced non-finite coefficients")
    return replace(model, consequents=theta.reshape(model.consequents.shape))


def training_mse(model: TskModel, X, y) -> float:
    X, y = _as_xy((np.asarray(X, dtype=np.float64), np.asarray(y, dtype=np.float64)))
    r = predict(model, X) - y
    return float(np.mean(r * r))


def hybrid_train(
    model: TskModel, data, epochs: int = 20, learning_rate: float = 0.01
) -> tuple[TskModel, list[float]]:
    """Alternate least-squares consequents and gradient-descent premises.

    Each epoch solves the consequents for the current premises, records the
    training MSE, then takes one step of size ``learning_rate`` down the mean
    squared-error gradient of the premises (widths clamped at
    ``SIGMA_MIN``). A closing least-squares pass fits the consequents to the
    final premises. With ``learning_rate == 0`` this is plain least squares.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    X, y = _as_xy(data)
    if X.shape[1] != model.input_dim:
        raise DimensionMismatch(f"expected {model.input_dim} inputs, got {X.shape[1]}")
    trace = []
    for _ in range(epochs):
        model = fit_consequents(model, X, y)
        r = predict(model, X) - y
        trace.append(float(np.mean(r * r)))
        if learning_rate:
            grad = _batch_gradient(model, X, y).mean(axis=0)
            theta = model.premise_vector() - learning_rate * grad
            n = model.centers.size
            theta[n:] = np.maximum(theta[n:], SIGMA_MIN)
            model = model.with_premises(theta)
    if learning_rate:
        model = fit_consequents(model, X, y)
    return model, trace


def format_rules(model: TskModel) -> str:
    """Rules in the ``If (in1 is in1mf1) and ... then (f1)`` layout.

    Each rule owns one membership function per input, so rule ``k`` uses
    ``mf k`` on every input.
    """
    lines = []
    for k in range(model.n_rules):
        terms = " and ".join(f"(in{i + 1} is in{i + 1}mf{k + 1})" for i in range(model.input_dim))
        lines.append(f"{k + 1}. If {terms} then (f{k + 1})")
    return "\n".join(lines) + "\n"


def membership_table(model: TskModel, names=None) -> list[dict]:
    """Flat dump of every membership function in input units."""
    names = names or [f"in{i + 1}" for i in range(model.input_dim)]
    lo, hi = model.normalization[:, 0], model.normalization[:, 1]
    span = np.where(hi > lo, hi - lo, 1.0)
    rows = []
    for k in range(model.n_rules):
        for i in range(model.input_dim):
            rows.append(
                {
                    "input": names[i],
                    "mf": f"{names[i]}mf{k + 1}",
                    "rule": k + 1,
                    "center": float(model.centers[k, i] * span[i] + lo[i]),
                    "sigma": float(model.sigmas[k, i] * span[i]),
                }
            )
    return rows
