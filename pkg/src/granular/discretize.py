"""Whole-table discretization with one scalar SOM per attribute.

Fitted on a training table and then applied unchanged to any table with the
same schema, so test objects are coded with the training granules.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import SchemaMismatch
from .som import SomModel, apply_discretizer, fit_discretizer
from .table import NUMERIC, AttributeSpec, InformationTable


@dataclass(frozen=True)
class Discretizer:
    n_categories: int
    models: dict[str, SomModel]  # attribute name -> sorted scalar SOM
    decision: SomModel | None = None

    def apply(self, table: InformationTable) -> InformationTable:
        missing = set(self.models) - set(table.names)
        if missing:
            raise SchemaMismatch(f"table lacks discretized attributes {sorted(missing)}")
        X = table.X.copy()
        for c, name in enumerate(table.names):
            if name in self.models:
                X[:, c] = apply_discretizer(self.models[name], X[:, c])
        y = table.y
        if self.decision is not None:
            y = apply_discretizer(self.decision, y).astype(np.float64)
        attrs = tuple(AttributeSpec(a.name, NUMERIC) for a in table.attributes)
        return table.with_values(
            X.astype(np.int64), y, attributes=attrs, decision=AttributeSpec(table.decision.name)
        )

    def to_json(self) -> dict:
        return {
            "n_categories": self.n_categories,
            "attributes": {k: m.to_json() for k, m in self.models.items()},
            "decision": self.decision.to_json() if self.decision is not None else None,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, doc) -> "Discretizer":
        dec = doc.get("decision")
        return cls(
            int(doc["n_categories"]),
            {k: SomModel.from_json(v) for k, v in doc["attributes"].items()},
            SomModel.from_json(dec) if dec else None,
        )


def fit_table(table: InformationTable, n_categories: int = 3, seed: int = 42) -> Discretizer:
    """Fit one ordinal SOM per condition attribute.

    The decision is discretized too, but only when it is not already
    integer-coded. Per-attribute seeds are spawned from ``seed``.
    """
    X, y = table.X, table.y
    children = np.random.SeedSequence(seed).spawn(X.shape[1] + 1)
    seeds = [int(c.generate_state(1)[0]) for c in children]
    models = {
        name: fit_discretizer(X[:, c], n_categories, seed=seeds[c])
        for c, name in enumerate(table.names)
    }
    dec = None
    if not np.all(y == np.round(y)):
        dec = fit_discretizer(y, n_categories, seed=seeds[-1])
    return Discretizer(n_categories, models, dec)


def discretize_table(
    table: InformationTable, n_categories: int = 3, seed: int = 42
) -> tuple[InformationTable, Discretizer]:
    disc = fit_table(table, n_categories, seed)
    return disc.apply(table), disc
