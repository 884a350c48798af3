"""Information tables: objects described by condition attributes and one
decision attribute.

Tables are immutable. Categorical cells may hold either a label from the
attribute's ``code_map`` or the integer code itself; ``encode_categorical``
normalises everything to codes, and ``load_table`` returns encoded tables.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .errors import BadSplit, MissingCell, SchemaMismatch, UnknownAttribute, UnknownCategory

NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str = NUMERIC
    code_map: Mapping[str, int] | None = None

    def __post_init__(self):
        if not self.name or not self.name.isidentifier():
            raise SchemaMismatch(f"attribute name {self.name!r} is not an identifier")
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise SchemaMismatch(f"{self.name}: unknown kind {self.kind!r}")
        if self.kind == NUMERIC and self.code_map is not None:
            raise SchemaMismatch(f"{self.name}: numeric attribute cannot carry a code_map")
        if self.kind == CATEGORICAL:
            if not self.code_map:
                raise SchemaMismatch(f"{self.name}: categorical attribute needs a code_map")
            codes = list(self.code_map.values())
            if any(not isinstance(c, int) or isinstance(c, bool) or c < 1 for c in codes):
                raise SchemaMismatch(f"{self.name}: codes must be positive integers")
            if len(set(codes)) != len(codes):
                raise SchemaMismatch(f"{self.name}: codes must be distinct")
            # freeze a private copy so callers cannot mutate the spec
            object.__setattr__(self, "code_map", dict(self.code_map))

    def __hash__(self):
        items = tuple(sorted(self.code_map.items())) if self.code_map else None
        return hash((self.name, self.kind, items))

    @property
    def display_name(self) -> str:
        return self.name.replace("_", " ")

    def encode(self, value):
        """Return the numeric form of one cell."""
        if self.kind == NUMERIC:
            return float(value)
        if isinstance(value, str):
            if value in self.code_map:
                return self.code_map[value]
            raise UnknownCategory(f"{self.name}: unknown category {value!r}")
        code = int(value)
        if code != value or code not in self.code_map.values():
            raise UnknownCategory(f"{self.name}: {value!r} is not a valid code")
        return code

    def decode(self, value) -> str:
        """Text form of an encoded cell, as written to CSV."""
        if self.kind == CATEGORICAL:
            for label, code in self.code_map.items():
                if code == value:
                    return label
            raise UnknownCategory(f"{self.name}: {value!r} is not a valid code")
        value = float(value)
        return str(int(value)) if value.is_integer() else repr(value)

    def to_json(self) -> dict:
        return {"name": self.name, "kind": self.kind, "codes": self.code_map}

    @classmethod
    def from_json(cls, doc: Mapping) -> "AttributeSpec":
        codes = doc.get("codes")
        return cls(doc["name"], doc.get("kind", NUMERIC), dict(codes) if codes else None)


@dataclass(frozen=True)
class InformationTable:
    """Condition attributes, a decision attribute, and one row per object.

    Each row lists the condition values in attribute order followed by the
    decision value.
    """

    attributes: tuple[AttributeSpec, ...]
    decision: AttributeSpec
    rows: tuple[tuple, ...]
    ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if not self.ids:
            object.__setattr__(self, "ids", tuple(range(len(self.rows))))
        else:
            object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))
        if len(self.attributes) < 1:
            raise SchemaMismatch("at least one condition attribute is required")
        if len(self.rows) < 1:
            raise SchemaMismatch("a table needs at least one object")
        if len(self.ids) != len(self.rows) or len(set(self.ids)) != len(self.ids):
            raise SchemaMismatch("ids must be unique, one per row")
        names = [a.name for a in self.schema]
        if len(set(names)) != len(names):
            raise SchemaMismatch("attribute names must be unique")
        width = len(self.schema)
        for oid, row in zip(self.ids, self.rows):
            if len(row) != width:
                raise SchemaMismatch(f"row {oid}: expected {width} values, got {len(row)}")
            for spec, value in zip(self.schema, row):
                if value is None or (isinstance(value, str) and value == ""):
                    raise MissingCell(f"row {oid}, column {spec.name!r}: empty cell")
                if isinstance(value, float) and np.isnan(value):
                    raise MissingCell(f"row {oid}, column {spec.name!r}: NaN cell")
                if spec.kind == CATEGORICAL:
                    spec.encode(value)

    @property
    def schema(self) -> tuple[AttributeSpec, ...]:
        return self.attributes + (self.decision,)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def __len__(self):
        return len(self.rows)

    def index_of(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise UnknownAttribute(f"no condition attribute named {name!r}")

    @property
    def X(self) -> np.ndarray:
        """Encoded condition values as a float array (objects x attributes)."""
        enc = encode_categorical(self)
        return np.array([r[:-1] for r in enc.rows], dtype=np.float64).reshape(len(self), -1)

    @property
    def y(self) -> np.ndarray:
        enc = encode_categorical(self)
        return np.array([r[-1] for r in enc.rows], dtype=np.float64)

    def record(self, i: int) -> dict:
        """Row ``i`` (positional) as an attribute-name -> value mapping."""
        return {a.name: v for a, v in zip(self.schema, self.rows[i])}

    def subset(self, positions: Sequence[int]) -> "InformationTable":
        return replace(
            self,
            rows=tuple(self.rows[p] for p in positions),
            ids=tuple(self.ids[p] for p in positions),
        )

    def with_values(self, X, y=None, attributes=None, decision=None) -> "InformationTable":
        """Copy of the table with new condition (and optionally decision) values."""
        X = np.asarray(X)
        y = self.y if y is None else np.asarray(y)
        rows = tuple(tuple(_py(v) for v in xr) + (_py(yv),) for xr, yv in zip(X, y))
        return InformationTable(
            attributes=tuple(attributes) if attributes is not None else self.attributes,
            decision=decision if decision is not None else self.decision,
            rows=rows,
            ids=self.ids,
        )

    def to_json(self) -> dict:
        return {
            "attributes": [a.to_json() for a in self.attributes],
            "decision": self.decision.to_json(),
            "ids": list(self.ids),
            "rows": [[_py(v) for v in r] for r in encode_categorical(self).rows],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "InformationTable":
        return cls(
            attributes=tuple(AttributeSpec.from_json(a) for a in doc["attributes"]),
            decision=AttributeSpec.from_json(doc["decision"]),
            rows=tuple(tuple(r) for r in doc["rows"]),
            ids=tuple(doc.get("ids", ())),
        )


def _py(v):
    """numpy scalar -> plain Python number, integral floats kept as float."""
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


@dataclass(frozen=True)
class SplitSpec:
    n_train: int
    seed: int = 42

    def __post_init__(self):
        if self.n_train < 1:
            raise BadSplit("n_train must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise BadSplit("seed must be a 64-bit unsigned integer")


def encode_categorical(table: InformationTable) -> InformationTable:
    """Replace categorical labels by their integer codes.

    Numeric columns become floats. Applying this to an encoded table returns
    an equal table.
    """
    rows = tuple(
        tuple(spec.encode(v) for spec, v in zip(table.schema, row)) for row in table.rows
    )
    if rows == table.rows:
        return table
    return replace(table, rows=rows)


def load_table(
    source: TextIO | bytes | str,
    schema: Sequence[AttributeSpec],
    decision: str | None = None,
) -> InformationTable:
    """Parse CSV text into an encoded, validated table.

    ``schema`` lists every column in file order; the decision column is the
    one named ``decision`` (default: the last column).

    >>> spec = [AttributeSpec("thickness"), AttributeSpec("dilution")]
    >>> t = load_table("thickness,dilution\\n1.5,2\\n0.8,1\\n", spec)
    >>> len(t), t.names
    (2, ('thickness',))
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaMismatch("empty input: no header row") from None
    schema = list(schema)
    if header != [s.name for s in schema]:
        raise SchemaMismatch(f"header {header} does not match schema {[s.name for s in schema]}")
    dec_pos = len(schema) - 1 if decision is None else header.index(decision)

    rows = []
    for raw in reader:
        if not raw or raw == [""]:
            continue
        oid = len(rows)
        if len(raw) != len(schema):
            raise MissingCell(f"row {oid}: expected {len(schema)} cells, got {len(raw)}")
        parsed = []
        for spec, cell in zip(schema, raw):
            cell = cell.strip()
            if cell == "":
                raise MissingCell(f"row {oid}, column {spec.name!r}: empty cell")
            if spec.kind == NUMERIC:
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise SchemaMismatch(
                        f"row {oid}, column {spec.name!r}: {cell!r} is not numeric"
                    ) from None
            elif cell in spec.code_map:
                parsed.append(spec.code_map[cell])
            elif cell.isdigit() and int(cell) in spec.code_map.values():
                parsed.append(int(cell))
            else:
                raise UnknownCategory(f"row {oid}, column {spec.name!r}: unknown category {cell!r}")
        dec_value = parsed.pop(dec_pos)
        rows.append(tuple(parsed) + (dec_value,))

    if len(rows) < 2:
        raise SchemaMismatch(f"at least two objects are required, got {len(rows)}")
    specs = list(schema)
    dec_spec = specs.pop(dec_pos)
    return InformationTable(attributes=tuple(specs), decision=dec_spec, rows=tuple(rows))


def write_csv(table: InformationTable, out: TextIO | None = None) -> str:
    """Serialise ``table`` as CSV (decision last, categorical cells as labels)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([a.name for a in table.schema])
    for row in encode_categorical(table).rows:
        writer.writerow([spec.decode(v) for spec, v in zip(table.schema, row)])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def dumps_json(table: InformationTable) -> str:
    return json.dumps(table.to_json(), sort_keys=True)


def infer_schema(
    header: Sequence[str],
    rows: Iterable[Sequence[str]],
    known: Mapping[str, AttributeSpec] | None = None,
) -> list[AttributeSpec]:
    """Guess a schema from raw CSV cells.

    Columns listed in ``known`` keep their spec. Columns whose every cell
    parses as a float are numeric; anything else becomes categorical with
    codes assigned in order of first appearance.
    """
    known = known or {}
    rows = [list(r) for r in rows]
    specs = []
    for c, name in enumerate(header):
        if name in known:
            specs.append(known[name])
            continue
        cells = [r[c].strip() for r in rows if c < len(r) and r[c].strip()]
        try:
            for cell in cells:
                float(cell)
            specs.append(AttributeSpec(name))
        except ValueError:
            codes: dict[str, int] = {}
            for cell in cells:
                codes.setdefault(cell, len(codes) + 1)
            specs.append(AttributeSpec(name, CATEGORICAL, codes))
    return specs


def split_train_test(
    table: InformationTable, spec: SplitSpec
) -> tuple[InformationTable, InformationTable]:
    """Seeded random partition into training and testing tables.

    Both parts keep the original row order and object ids.
    """
    n = len(table)
    if spec.n_train >= n:
        raise BadSplit(f"n_train={spec.n_train} must be smaller than the {n} objects")
    rng = np.random.default_rng(spec.seed)
    picked = np.sort(rng.permutation(n)[: spec.n_train])
    mask = np.zeros(n, dtype=bool)
    mask[picked] = True
    train_pos = np.flatnonzero(mask).tolist()
    test_pos = np.flatnonzero(~mask).tolist()
    return table.subset(train_pos), table.subset(test_pos)
