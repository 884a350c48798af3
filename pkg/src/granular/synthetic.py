"""Synthetic longwall-dilution dataset with a known ground truth.

Thirteen condition attributes describe a stope; dilution depends on exactly
five of them (``SENSITIVE``). Each sensitive attribute is scaled to [0, 1],
oriented so that larger means more dilution, and weighted equally::

    score = 0.2 * (thickness + stope length + advance rate + miners + forward)

where ``forward`` is 1 for forward extraction and 0 for backward. The
dilution category is 1/2/3 for scores below ``CUTS[0]``, between the cuts,
and above ``CUTS[1]``. Generated rows add uniform noise of at most
``NOISE`` to the score before cutting. The other eight attributes are
drawn independently and never touch the decision.
"""

from __future__ import annotations

from importlib import resources
from typing import Mapping

import numpy as np

from .table import CATEGORICAL, AttributeSpec, InformationTable, load_table

CONTRACT = {"Contract work": 1, "Service(state)": 2}
DRILLING = {"Pic": 1, "Drilling &blasting": 2}
EXTRACTION = {"Forward": 1, "Backward": 2}
FLOOR_ROCK = {"Argillite": 1, "Sandy rock": 2}

# name -> (low, high) for numeric draws, or a code map for categoricals
_ROSTER: dict[str, tuple[float, float] | dict[str, int]] = {
    "thickness_of_layer": (0.6, 2.6),
    "length_of_stope": (60.0, 220.0),
    "rate_of_advance": (0.5, 3.5),
    "number_of_miners": (12, 60),
    "type_of_extraction": EXTRACTION,
    "dip": (3.0, 35.0),
    "contract_type": CONTRACT,
    "drilling_instrument": DRILLING,
    "type_of_floor_rock": FLOOR_ROCK,
    "depth_of_seam": (150.0, 600.0),
    "height_of_extraction": (1.2, 3.0),
    "support_spacing": (0.8, 1.6),
    "roof_strength": (20.0, 90.0),
}

SENSITIVE = (
    "thickness_of_layer",
    "length_of_stope",
    "rate_of_advance",
    "number_of_miners",
    "type_of_extraction",
)
CUTS = (0.42, 0.58)
NOISE = 0.03
DECISION = AttributeSpec("dilution")

ATTRIBUTES = tuple(
    AttributeSpec(name, CATEGORICAL, spec) if isinstance(spec, dict) else AttributeSpec(name)
    for name, spec in _ROSTER.items()
)
SCHEMA = ATTRIBUTES + (DECISION,)
KNOWN_SPECS = {a.name: a for a in ATTRIBUTES if a.kind == CATEGORICAL}


def dilution_score(record: Mapping[str, float]) -> float:
    """Noise-free ground-truth score in [0, 1] for one encoded record."""
    total = 0.0
    for name in SENSITIVE[:4]:
        lo, hi = _ROSTER[name]
        total += (float(record[name]) - lo) / (hi - lo)
    total += 1.0 if int(record["type_of_extraction"]) == EXTRACTION["Forward"] else 0.0
    return 0.2 * total


def dilution_category(record: Mapping[str, float], noise: float = 0.0) -> int:
    s = dilution_score(record) + noise
    if s < CUTS[0]:
        return 1
    if s < CUTS[1]:
        return 2
    return 3


def generate_synthetic(n_rows: int, seed: int = 7) -> InformationTable:
    """Draw ``n_rows`` encoded objects; a pure function of ``(n_rows, seed)``."""
    if n_rows < 2:
        raise ValueError("n_rows must be at least 2")
    rng = np.random.default_rng(seed)
    columns = {}
    for name, spec in _ROSTER.items():
        if isinstance(spec, dict):
            columns[name] = rng.integers(1, len(spec) + 1, size=n_rows)
        elif name == "number_of_miners":
            columns[name] = rng.integers(spec[0], spec[1] + 1, size=n_rows)
        else:
            columns[name] = np.round(rng.uniform(spec[0], spec[1], size=n_rows), 2)
    noise = rng.uniform(-NOISE, NOISE, size=n_rows)

    rows = []
    for i in range(n_rows):
        rec = {}
        for a in ATTRIBUTES:
            v = columns[a.name][i]
            rec[a.name] = int(v) if a.kind == CATEGORICAL or a.name == "number_of_miners" else float(v)
        values = tuple(
            float(rec[a.name]) if a.kind != CATEGORICAL else rec[a.name] for a in ATTRIBUTES
        )
        rows.append(values + (float(dilution_category(rec, noise[i])),))
    return InformationTable(attributes=ATTRIBUTES, decision=DECISION, rows=tuple(rows))


def load_bundled() -> InformationTable:
    """The 30-row dataset shipped with the package (``generate_synthetic(30, 7)``)."""
    text = resources.files("granular.data").joinpath("synthetic_30.csv").read_text("utf-8")
    return load_table(text, SCHEMA)
