"""SONFIS-R: random SOM granulation feeding a TSK neuro-fuzzy model,
selected on held-out data.

For every rule budget in ``rule_budgets(max_rules)`` the search runs
``iterations_per_rule_count`` steps. A step draws a SOM size, replaces the
training patterns by the SOM prototypes, clusters those granules into at
most ``r`` rules, trains the TSK model, and scores it on the untouched test
set. The configuration with the lowest test MSE wins (earliest step on
ties).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import anfis, clustering
from .errors import EmptyData, GranularError, IndexOutOfRange, InsufficientData, LengthMismatch, SchemaMismatch
from .som import SomConfig, SomModel, train_som
from .table import InformationTable


@dataclass(frozen=True)
class SonfisConfig:
    granule_min: int = 5
    granule_max: int = 20
    max_rules: int = 4
    iterations_per_rule_count: int = 15
    nfis_epochs: int = 20
    seed: int = 42
    som_epochs: int = 100
    learning_rate: float = 0.01
    cluster: clustering.SubtractiveConfig = field(default_factory=clustering.SubtractiveConfig)

    def __post_init__(self):
        if not 1 <= self.granule_min <= self.granule_max:
            raise ValueError("need 1 <= granule_min <= granule_max")
        if self.max_rules < 1 or self.iterations_per_rule_count < 1 or self.nfis_epochs < 1:
            raise ValueError("max_rules, iterations_per_rule_count and nfis_epochs must be >= 1")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc) -> "SonfisConfig":
        doc = dict(doc)
        doc["cluster"] = clustering.SubtractiveConfig(**doc.get("cluster", {}))
        return cls(**doc)


@dataclass(frozen=True)
class IterationRecord:
    step: int
    n_neurons: int
    n_rules_requested: int
    n_rules: int
    mse: float


@dataclass(frozen=True)
class SonfisResult:
    config: SonfisConfig
    trace: tuple[IterationRecord, ...]
    best_step: int
    som: SomModel
    tsk: anfis.TskModel
    attribute_names: tuple[str, ...] = ()
    train_mean: tuple[float, ...] = ()
    train_range: tuple[tuple[float, float], ...] = ()

    @property
    def best(self) -> IterationRecord:
        return self.trace[self.best_step]

    @property
    def mse(self) -> float:
        return self.best.mse

    def to_json(self) -> dict:
        b = self.best
        return {
            "config": self.config.to_json(),
            "trace": [
                {
                    "step": r.step,
                    "n_neurons": r.n_neurons,
                    "n_rules_requested": r.n_rules_requested,
                    "n_rules": r.n_rules,
                    "mse": r.mse,
                }
                for r in self.trace
            ],
            "best": {
                "step": b.step,
                "n_neurons": b.n_neurons,
                "n_rules": b.n_rules,
                "mse": b.mse,
                "som": self.som.to_json(),
                "tsk": self.tsk.to_json(),
                "attributes": list(self.attribute_names),
                "train_mean": list(self.train_mean),
                "train_range": [list(r) for r in self.train_range],
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, doc) -> "SonfisResult":
        trace = tuple(IterationRecord(**r) for r in doc["trace"])
        best = doc["best"]
        return cls(
            SonfisConfig.from_json(doc["config"]),
            trace,
            int(best["step"]),
            SomModel.from_json(best["som"]),
            anfis.TskModel.from_json(best["tsk"]),
            tuple(best.get("attributes", ())),
            tuple(best.get("train_mean", ())),
            tuple(tuple(r) for r in best.get("train_range", ())),
        )


def mse(predictions, targets) -> float:
    """Mean of squared differences between two equal-length sequences."""
    p = np.asarray(predictions, dtype=np.float64).ravel()
    t = np.asarray(targets, dtype=np.float64).ravel()
    if p.shape != t.shape:
        raise LengthMismatch(f"{p.size} predictions for {t.size} targets")
    if p.size == 0:
        raise EmptyData("mse of empty sequences")
    r = t - p
    return float(np.dot(r, r) / r.size)


def rule_budgets(max_rules: int) -> list[int]:
    """Rule counts searched: ``2..max_rules``, or just ``[1]`` when
    ``max_rules == 1``.

    A single rule is a global linear regression rather than a fuzzy
    partition, so it is only searched when nothing else is allowed. With the
    default four-rule ceiling and 15 iterations this gives 45 steps.
    """
    if max_rules < 1:
        raise ValueError("max_rules must be >= 1")
    return [1] if max_rules == 1 else list(range(2, max_rules + 1))


def step_seeds(seed: int, n_steps: int) -> list[int]:
    """Independent per-step seeds spawned from the master seed."""
    children = np.random.SeedSequence(seed).spawn(n_steps)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def run_step(
    X_train: np.ndarray,
    y_train: np.ndarray,
    X_test: np.ndarray,
    y_test: np.ndarray,
    n_neurons: int,
    n_rules: int,
    seed: int,
    config: SonfisConfig,
) -> tuple[SomModel, anfis.TskModel, float]:
    """One close-open step: granulate, cluster, train, score on test."""
    d = X_train.shape[1]
    patterns = np.column_stack([X_train, y_train])
    som = train_som(patterns, SomConfig(n_neurons, epochs=config.som_epochs, seed=seed))
    granules = som.prototypes()
    Gx, Gy = granules[:, :d], granules[:, d]

    scaled, bounds = clustering.minmax_scale(granules)
    clusters = clustering.subtractive_cluster(scaled, config.cluster, max_clusters=n_rules)
    model = anfis.init_from_clusters(clusters, (Gx, Gy), normalization=bounds[:d])
    model, _ = anfis.hybrid_train(model, (Gx, Gy), config.nfis_epochs, config.learning_rate)
    return som, model, mse(anfis.predict(model, X_test), y_test)


def run_sonfis_r(
    train: InformationTable, test: InformationTable, config: SonfisConfig | None = None
) -> SonfisResult:
    """Search SOM sizes and rule budgets; keep the lowest test-MSE model."""
    config = config or SonfisConfig()
    if train.names != test.names or train.decision.name != test.decision.name:
        raise SchemaMismatch("train and test tables must share one schema")
    X_train, y_train = train.X, train.y
    X_test, y_test = test.X, test.y
    if config.granule_max > len(train):
        raise InsufficientData(
            f"granule_max={config.granule_max} exceeds the {len(train)} training objects"
        )

    budgets = rule_budgets(config.max_rules)
    n_steps = len(budgets) * config.iterations_per_rule_count
    seeds = step_seeds(config.seed, n_steps)
    draw = np.random.default_rng(np.random.SeedSequence([config.seed, 0x50F15]))
    sizes = draw.integers(config.granule_min, config.granule_max + 1, size=n_steps)

    trace = []
    best = None
    step = 0
    for r in budgets:
        for _ in range(config.iterations_per_rule_count):
            k = int(sizes[step])
            try:
                som, model, err = run_step(
                    X_train, y_train, X_test, y_test, k, r, seeds[step], config
                )
            except GranularError as exc:
                raise type(exc)(f"step {step} (neurons={k}, rules={r}): {exc}") from exc
            trace.append(IterationRecord(step, k, r, model.n_rules, err))
            if best is None or err < best[0]:
                best = (err, step, som, model)
            step += 1

    _, best_step, som, model = best
    lo, hi = X_train.min(axis=0), X_train.max(axis=0)
    return SonfisResult(
        config,
        tuple(trace),
        best_step,
        som,
        model,
        train.names,
        tuple(float(v) for v in X_train.mean(axis=0)),
        tuple((float(a), float(b)) for a, b in zip(lo, hi)),
    )


@dataclass(frozen=True)
class Surface:
    xs: np.ndarray
    ys: np.ndarray
    z: np.ndarray  # z[a, b] = output at (xs[a], ys[b])

    def rows(self):
        for a, xv in enumerate(self.xs):
            for b, yv in enumerate(self.ys):
                yield float(xv), float(yv), float(self.z[a, b])

    def to_csv(self, names=("x_i", "x_j")) -> str:
        lines = [f"{names[0]},{names[1]},z"]
        lines += [f"{x!r},{y!r},{z!r}" for x, y, z in self.rows()]
        return "\n".join(lines) + "\n"


def response_surface(
    model: anfis.TskModel,
    attr_i: int,
    attr_j: int,
    grid_n: int = 20,
    baseline=None,
    ranges=None,
) -> Surface:
    """Model output over a ``grid_n x grid_n`` lattice of two inputs.

    The other inputs stay at ``baseline`` (default: centre of the model's
    normalisation box). ``ranges`` gives the ``(min, max)`` per input to span;
    by default the model's normalisation bounds.
    """
    d = model.input_dim
    for a in (attr_i, attr_j):
        if not 0 <= a < d:
            raise IndexOutOfRange(f"attribute index {a} outside 0..{d - 1}")
    if attr_i == attr_j:
        raise IndexOutOfRange("surface axes must be two distinct attributes")
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    bounds = np.asarray(ranges if ranges is not None else model.normalization, dtype=np.float64)
    base = (
        bounds.mean(axis=1) if baseline is None else np.asarray(baseline, dtype=np.float64).copy()
    )
    xs = np.linspace(bounds[attr_i, 0], bounds[attr_i, 1], grid_n)
    ys = np.linspace(bounds[attr_j, 0], bounds[attr_j, 1], grid_n)
    grid = np.tile(base, (grid_n * grid_n, 1))
    grid[:, attr_i] = np.repeat(xs, grid_n)
    grid[:, attr_j] = np.tile(ys, grid_n)
    z = anfis.predict(model, grid).reshape(grid_n, grid_n)
    return Surface(xs, ys, z)
