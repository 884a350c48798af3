"""Subtractive clustering (Chiu, 1994).

Every data point is a candidate centre. Its potential is a sum of Gaussian
kernels over the other points; the best candidate becomes a centre and the
potential around it is subtracted before the next pick. Data must already
be scaled to [0, 1] per dimension.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, EmptyData


@dataclass(frozen=True)
class SubtractiveConfig:
    radius: float = 0.5
    squash: float = 1.25
    accept_ratio: float = 0.5
    reject_ratio: float = 0.15

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.squash <= 1:
            raise ValueError("squash factor must exceed 1")
        if not 0 < self.accept_ratio < 1:
            raise ValueError("accept_ratio must lie in (0, 1)")
        if not 0 < self.reject_ratio < self.accept_ratio:
            raise ValueError("reject_ratio must lie in (0, accept_ratio)")


@dataclass(frozen=True)
class ClusterSet:
    centers: np.ndarray  # (k, d)
    potentials: np.ndarray  # potential of each centre when it was picked
    indices: tuple[int, ...]  # data rows chosen as centres
    config: SubtractiveConfig

    def __len__(self):
        return len(self.indices)

    def to_json(self) -> dict:
        return {
            "centers": np.asarray(self.centers).tolist(),
            "potentials": np.asarray(self.potentials).tolist(),
            "indices": list(self.indices),
            "config": asdict(self.config),
        }

    @classmethod
    def from_json(cls, doc) -> "ClusterSet":
        return cls(
            np.array(doc["centers"], dtype=np.float64),
            np.array(doc["potentials"], dtype=np.float64),
            tuple(doc.get("indices", ())),
            SubtractiveConfig(**doc["config"]),
        )


def minmax_scale(X) -> tuple[np.ndarray, np.ndarray]:
    """Scale columns to [0, 1]; constant columns map to 0.

    Returns the scaled data and the ``(d, 2)`` array of per-column bounds.
    """
    X = np.asarray(X, dtype=np.float64)
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return (X - lo) / span, np.column_stack([lo, hi])


def initial_potentials(X, radius: float) -> np.ndarray:
    """``P_i = sum_j exp(-4 |x_i - x_j|^2 / radius^2)``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    return _kernels.potentials(X, 4.0 / radius**2)


def subtractive_cluster(
    data, config: SubtractiveConfig | None = None, max_clusters: int | None = None
) -> ClusterSet:
    """Pick cluster centres among the data points.

    After each accepted centre ``x*`` with potential ``P*`` the remaining
    potentials drop by ``P* exp(-4 |x - x*|^2 / rb^2)`` with
    ``rb = squash * radius``. A candidate above ``accept_ratio`` times the
    first potential is accepted; below ``reject_ratio`` times it the search
    stops. In between, the candidate is accepted only if
    ``d_min / radius + P / P_first >= 1`` (``d_min`` being its distance to the
    nearest existing centre); otherwise its potential is zeroed and the next
    best candidate is tried. Ties go to the lowest data index.
    """
    config = config or SubtractiveConfig()
    X = np.asarray(data, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch("data must be a list of equal-length vectors")
    if X.shape[0] == 0:
        raise EmptyData("no data to cluster")
    n = X.shape[0]
    limit = n if max_clusters is None else min(int(max_clusters), n)
    if limit < 1:
        raise ValueError("max_clusters must be >= 1")

    P = initial_potentials(X, config.radius)
    beta = 4.0 / (config.squash * config.radius) ** 2
    first = int(np.argmax(P))
    p_first = P[first]
    picked = [first]
    pots = [p_first]

    while len(picked) < limit:
        last = X[picked[-1]]
        P = P - pots[-1] * np.exp(-beta * ((X - last) ** 2).sum(axis=1))
        while True:
            k = int(np.argmax(P))
            pk = P[k]
            if pk <= 0.0 or pk < config.reject_ratio * p_first:
                return _result(X, picked, pots, config)
            if pk > config.accept_ratio * p_first:
                break
            d_min = np.sqrt(((X[picked] - X[k]) ** 2).sum(axis=1)).min()
            if d_min / config.radius + pk / p_first >= 1.0:
                break
            P[k] = 0.0
        picked.append(k)
        pots.append(pk)
    return _result(X, picked, pots, config)


def _result(X, picked, pots, config) -> ClusterSet:
    return ClusterSet(X[picked].copy(), np.array(pots), tuple(int(i) for i in picked), config)
