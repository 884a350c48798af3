"""Rough-set analysis of categorical information tables.

Covers indiscernibility partitions, lower/upper approximations, the
decision-relative discernibility matrix and its CNF function, reducts
(Johnson's greedy heuristic plus an exhaustive oracle), rule induction and
rule-based classification.

Attribute subsets are given by name or by position among the condition
attributes. Discernibility clauses are stored as integer bitmasks over
attribute positions, which caps a matrix at 62 attributes.
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import (
    EmptyReduct,
    MissingAttributeValue,
    NonCategoricalValue,
    SchemaMismatch,
    TooManyAttributes,
    UnknownAttribute,
)
from .table import InformationTable

MAX_ENUMERATION_ATTRIBUTES = 20
_MAX_MASK_BITS = 62


# --------------------------------------------------------------------------
# categorical views


def _codes(table: InformationTable) -> tuple[np.ndarray, np.ndarray]:
    """Integer condition matrix and decision vector."""
    X = table.X
    y = table.y
    for name, col in zip(table.names, X.T):
        if not np.all(np.isfinite(col)) or np.any(col != np.round(col)):
            raise NonCategoricalValue(f"attribute {name!r} has non-integer values; discretize first")
    if not np.all(y == np.round(y)):
        raise NonCategoricalValue(f"decision {table.decision.name!r} has non-integer values")
    return X.astype(np.int64), y.astype(np.int64)


def _positions(table: InformationTable, B: Iterable) -> list[int]:
    out = []
    for b in B:
        if isinstance(b, str):
            out.append(table.index_of(b))
        else:
            b = int(b)
            if not 0 <= b < len(table.attributes):
                raise UnknownAttribute(f"attribute index {b} out of range")
            out.append(b)
    return sorted(set(out))


# --------------------------------------------------------------------------
# partitions and approximations


@dataclass(frozen=True)
class Partition:
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(sorted((frozenset(b) for b in self.blocks), key=lambda b: min(b)))
        if any(not b for b in blocks):
            raise ValueError("partition blocks must be nonempty")
        seen: set[int] = set()
        for b in blocks:
            if seen & b:
                raise ValueError("partition blocks must be disjoint")
            seen |= b
        object.__setattr__(self, "blocks", blocks)

    @property
    def universe(self) -> frozenset[int]:
        return frozenset().union(*self.blocks)

    def block_of(self, x: int) -> frozenset[int]:
        for b in self.blocks:
            if x in b:
                return b
        raise KeyError(x)

    def refine(self, other: "Partition") -> "Partition":
        """Common refinement: nonempty pairwise intersections of blocks."""
        out = [a & b for a in self.blocks for b in other.blocks]
        return Partition(tuple(b for b in out if b))


def indiscernibility(table: InformationTable, B: Iterable = ()) -> Partition:
    """Equivalence classes of objects agreeing on every attribute in ``B``.

    Blocks hold object ids.
    """
    cols = _positions(table, B)
    C, _ = _codes(table)
    groups: dict[tuple, set[int]] = defaultdict(set)
    for oid, row in zip(table.ids, C):
        groups[tuple(row[cols])].add(oid)
    return Partition(tuple(frozenset(g) for g in groups.values()))


def lower_approx(table: InformationTable, B: Iterable, X: Iterable[int]) -> frozenset[int]:
    X = frozenset(X)
    _check_subset(table, X)
    part = indiscernibility(table, B)
    return frozenset().union(*(b for b in part.blocks if b <= X))


def upper_approx(table: InformationTable, B: Iterable, X: Iterable[int]) -> frozenset[int]:
    X = frozenset(X)
    _check_subset(table, X)
    part = indiscernibility(table, B)
    return frozenset().union(*(b for b in part.blocks if b & X))


def _check_subset(table: InformationTable, X: frozenset[int]):
    extra = X - set(table.ids)
    if extra:
        raise ValueError(f"objects {sorted(extra)} are not in the table")


# --------------------------------------------------------------------------
# discernibility


@dataclass(frozen=True)
class DiscernibilityMatrix:
    """Decision-relative discernibility entries.

    ``entries`` maps an object-id pair ``(i, j)`` with ``i > j`` and
    differing decisions to the set of condition-attribute positions on which
    the two objects differ.
    """

    names: tuple[str, ...]
    entries: Mapping[tuple[int, int], frozenset[int]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.names) > _MAX_MASK_BITS:
            raise TooManyAttributes(f"at most {_MAX_MASK_BITS} attributes are supported")
        norm = {}
        for (i, j), c in self.entries.items():
            key = (i, j) if i > j else (j, i)
            norm[key] = frozenset(c)
        object.__setattr__(self, "entries", norm)

    @classmethod
    def from_clauses(cls, names: Sequence[str], clauses: Iterable[Iterable]) -> "DiscernibilityMatrix":
        """Matrix with synthetic pair keys, handy for exercising reduct code."""
        index = {n: k for k, n in enumerate(names)}
        entries = {}
        for k, clause in enumerate(clauses):
            attrs = frozenset(index[a] if isinstance(a, str) else int(a) for a in clause)
            entries[(k + 1, 0)] = attrs
        return cls(tuple(names), entries)

    def get(self, i: int, j: int) -> frozenset[int]:
        """``c_ij`` (symmetric); empty for pairs with equal decisions."""
        return self.entries.get((i, j) if i > j else (j, i), frozenset())

    def clause_masks(self) -> np.ndarray:
        """Distinct nonempty clauses as sorted int64 bitmasks."""
        masks = {sum(1 << a for a in c) for c in self.entries.values() if c}
        return np.array(sorted(masks), dtype=np.int64)

    def named(self, attrs: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.names[a] for a in sorted(attrs))


def discernibility_matrix(table: InformationTable) -> DiscernibilityMatrix:
    C, d = _codes(table)
    if C.shape[1] > _MAX_MASK_BITS:
        raise TooManyAttributes(f"at most {_MAX_MASK_BITS} attributes are supported")
    ii, jj, masks = _kernels.discern_masks(np.ascontiguousarray(C), d)
    ids = table.ids
    entries = {}
    for i, j, m in zip(ii.tolist(), jj.tolist(), masks.tolist()):
        entries[(ids[i], ids[j])] = _bits(m)
    return DiscernibilityMatrix(table.names, entries)


def _bits(mask: int) -> frozenset[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return frozenset(out)


@dataclass(frozen=True)
class DiscernibilityFunction:
    """CNF over attribute variables: a conjunction of disjunctive clauses.

    The empty conjunction is constant true.
    """

    names: tuple[str, ...]
    clauses: tuple[frozenset[int], ...]

    def __call__(self, assignment: Mapping[str, bool] | Iterable[int]) -> bool:
        if isinstance(assignment, Mapping):
            true = {self.names.index(n) for n, v in assignment.items() if v}
        else:
            true = set(assignment)
        return all(c & true for c in self.clauses)

    def __str__(self):
        if not self.clauses:
            return "TRUE"
        return " AND ".join(
            "(" + " OR ".join(self.names[a] for a in sorted(c)) + ")" for c in self.clauses
        )


def discernibility_function(matrix: DiscernibilityMatrix) -> DiscernibilityFunction:
    """CNF of the matrix with duplicate clauses merged and absorbed
    supersets dropped."""
    clauses = sorted({c for c in matrix.entries.values() if c}, key=lambda c: (len(c), sorted(c)))
    kept: list[frozenset[int]] = []
    for c in clauses:
        if not any(k <= c for k in kept):
            kept.append(c)
    return DiscernibilityFunction(matrix.names, tuple(kept))


# --------------------------------------------------------------------------
# reducts


@dataclass(frozen=True)
class Reduct:
    attributes: tuple[str, ...]
    positions: tuple[int, ...] = ()

    def __len__(self):
        return len(self.attributes)

    def __iter__(self):
        return iter(self.attributes)

    def to_json(self) -> dict:
        return {"attributes": list(self.attributes), "positions": list(self.positions)}


def _reduct(matrix: DiscernibilityMatrix, positions: Iterable[int]) -> Reduct:
    pos = tuple(sorted(positions))
    return Reduct(matrix.named(pos), pos)


def johnson_reduct(matrix: DiscernibilityMatrix) -> Reduct:
    """Greedy set cover followed by reverse-order pruning.

    Repeatedly picks the attribute that occurs in the most uncovered clauses
    (lowest position on ties) until every clause is hit, then walks the picks
    last-to-first and drops any attribute the cover can do without. A table
    with no discerning clause yields the empty reduct.
    """
    clauses = [c for c in set(matrix.entries.values()) if c]
    uncovered = list(clauses)
    picks: list[int] = []
    m = len(matrix.names)
    while uncovered:
        counts = np.zeros(m, dtype=np.int64)
        for c in uncovered:
            for a in c:
                counts[a] += 1
        best = int(np.argmax(counts))
        picks.append(best)
        uncovered = [c for c in uncovered if best not in c]

    chosen = set(picks)
    for a in reversed(picks):
        trial = chosen - {a}
        if all(c & trial for c in clauses):
            chosen = trial
    return _reduct(matrix, chosen)


def all_reducts(matrix: DiscernibilityMatrix) -> list[Reduct]:
    """Every minimal hitting set of the nonempty clauses, by exhaustive
    enumeration of attribute subsets.

    Returned in ascending size, then lexicographic position order.
    """
    m = len(matrix.names)
    if m > MAX_ENUMERATION_ATTRIBUTES:
        raise TooManyAttributes(
            f"exhaustive reduct search is limited to {MAX_ENUMERATION_ATTRIBUTES} attributes, got {m}"
        )
    clauses = matrix.clause_masks()
    hit = _kernels.hitting_table(clauses, m)
    subsets = np.arange(1 << m, dtype=np.int64)
    minimal = hit.copy()
    for a in range(m):
        bit = np.int64(1 << a)
        has = (subsets & bit) != 0
        # a hitting subset is minimal iff no single removal still hits
        minimal &= ~(has & hit[subsets ^ bit])
    found = [_bits(int(s)) for s in np.flatnonzero(minimal)]
    found.sort(key=lambda s: (len(s), sorted(s)))
    return [_reduct(matrix, s) for s in found]


# --------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class DecisionRule:
    descriptors: tuple[tuple[str, int], ...]
    decision: int
    support: int = 1
    accuracy: float = 1.0
    decision_name: str = "dilution"

    def __post_init__(self):
        object.__setattr__(self, "descriptors", tuple((str(a), int(v)) for a, v in self.descriptors))
        attrs = [a for a, _ in self.descriptors]
        if not attrs:
            raise ValueError("a rule needs at least one descriptor")
        if len(set(attrs)) != len(attrs):
            raise ValueError("rule attributes must be distinct")
        if self.support < 1:
            raise ValueError("support must be >= 1")
        if not 0.0 < self.accuracy <= 1.0:
            raise ValueError("accuracy must lie in (0, 1]")

    def matches(self, record: Mapping[str, float]) -> bool:
        for a, v in self.descriptors:
            if a not in record:
                raise MissingAttributeValue(f"object has no value for {a!r}")
            if record[a] != v:
                return False
        return True

    def __str__(self):
        return format_rule(self)

    def to_json(self) -> dict:
        return {
            "descriptors": [[a, v] for a, v in self.descriptors],
            "decision": self.decision,
            "decision_name": self.decision_name,
            "support": self.support,
            "accuracy": self.accuracy,
        }

    @classmethod
    def from_json(cls, doc) -> "DecisionRule":
        return cls(
            tuple((a, v) for a, v in doc["descriptors"]),
            int(doc["decision"]),
            int(doc.get("support", 1)),
            float(doc.get("accuracy", 1.0)),
            doc.get("decision_name", "dilution"),
        )


def induce_rules(table: InformationTable, reduct: Reduct | Iterable) -> list[DecisionRule]:
    """One rule per distinct combination of reduct values in ``table``.

    The rule predicts the majority decision of its matching objects (lowest
    code on ties). Rules are sorted by support, descending, then by their
    descriptor codes.
    """
    attrs = reduct.attributes if isinstance(reduct, Reduct) else tuple(reduct)
    if not attrs:
        raise EmptyReduct("cannot induce rules from an empty reduct")
    cols = [table.index_of(a) if isinstance(a, str) else int(a) for a in attrs]
    names = [table.names[c] for c in cols]
    C, d = _codes(table)
    groups: dict[tuple[int, ...], Counter] = defaultdict(Counter)
    for row, dec in zip(C, d):
        groups[tuple(int(v) for v in row[cols])][int(dec)] += 1
    rules = []
    for key, votes in groups.items():
        support = sum(votes.values())
        decision = min(votes, key=lambda k: (-votes[k], k))
        rules.append(
            DecisionRule(
                tuple(zip(names, key)),
                decision,
                support,
                votes[decision] / support,
                table.decision.name,
            )
        )
    rules.sort(key=lambda r: (-r.support, tuple(v for _, v in r.descriptors)))
    return rules


def default_decision(rules: Sequence[DecisionRule]) -> int:
    """Training majority recovered from rule supports (lowest code on ties).

    Rules from ``induce_rules`` partition the training set, so summed support
    per predicted decision is the per-class count of objects they cover.
    """
    if not rules:
        raise ValueError("no rules to derive a default decision from")
    totals: Counter = Counter()
    for r in rules:
        totals[r.decision] += r.support
    return min(totals, key=lambda k: (-totals[k], k))


@dataclass(frozen=True)
class Classification:
    decision: int
    fired: tuple[int, ...]
    default_fired: bool
    votes: Mapping[int, int] = field(default_factory=dict)


def classify(
    rules: Sequence[DecisionRule], record: Mapping[str, float], default: int | None = None
) -> Classification:
    """Vote among matching rules, weighting each by its support.

    The decision with the largest summed support wins (lowest code on ties).
    With no matching rule the ``default`` (training majority when omitted) is
    returned and flagged.
    """
    fired = tuple(k for k, r in enumerate(rules) if r.matches(record))
    if not fired:
        if default is None:
            default = default_decision(rules)
        return Classification(int(default), (), True, {})
    votes: Counter = Counter()
    for k in fired:
        votes[rules[k].decision] += rules[k].support
    winner = min(votes, key=lambda c: (-votes[c], c))
    return Classification(winner, fired, False, dict(votes))


@dataclass(frozen=True)
class Evaluation:
    labels: tuple[int, ...]
    confusion: np.ndarray  # rows: actual, columns: predicted
    accuracy: float
    predictions: tuple[Classification, ...]
    ids: tuple[int, ...]
    actual: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "predictions": [
                {
                    "id": oid,
                    "actual": act,
                    "predicted": p.decision,
                    "fired": list(p.fired),
                    "default_fired": p.default_fired,
                }
                for oid, act, p in zip(self.ids, self.actual, self.predictions)
            ],
        }


def evaluate(
    rules: Sequence[DecisionRule], test: InformationTable, default: int | None = None
) -> Evaluation:
    """Classify every test object and tabulate a confusion matrix."""
    needed = {a for r in rules for a, _ in r.descriptors}
    missing = needed - set(test.names)
    if missing:
        raise SchemaMismatch(f"test table lacks rule attributes {sorted(missing)}")
    if rules and any(r.decision_name != test.decision.name for r in rules):
        raise SchemaMismatch("rules predict a different decision attribute")
    if default is None and rules:
        default = default_decision(rules)
    if default is None:
        raise ValueError("an empty rule list needs an explicit default decision")
    C, d = _codes(test)
    preds = []
    for row in C:
        rec = dict(zip(test.names, (int(v) for v in row)))
        preds.append(classify(rules, rec, default))
    actual = tuple(int(v) for v in d)
    labels = tuple(sorted(set(actual) | {p.decision for p in preds}))
    index = {c: k for k, c in enumerate(labels)}
    conf = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for a, p in zip(actual, preds):
        conf[index[a], index[p.decision]] += 1
    correct = sum(a == p.decision for a, p in zip(actual, preds))
    return Evaluation(labels, conf, correct / len(actual), tuple(preds), test.ids, actual)


# --------------------------------------------------------------------------
# text format: ``thickness of layer(3) AND length of stope(1) => dilution(1)``

_DESCRIPTOR = re.compile(r"^\s*(.+?)\((\d+)\)\s*$")


def _display(name: str) -> str:
    return name.replace("_", " ")


def _ident(text: str) -> str:
    return re.sub(r"\s+", "_", text.strip())


def format_rule(rule: DecisionRule) -> str:
    lhs = " AND ".join(f"{_display(a)}({v})" for a, v in rule.descriptors)
    return f"{lhs} => {_display(rule.decision_name)}({rule.decision})"


def parse_rule(line: str) -> DecisionRule:
    """Inverse of ``format_rule``; support and accuracy default to 1."""
    try:
        lhs, rhs = line.split("=>")
    except ValueError:
        raise ValueError(f"not a rule: {line!r}") from None
    descriptors = []
    for part in lhs.split(" AND "):
        m = _DESCRIPTOR.match(part)
        if not m:
            raise ValueError(f"bad descriptor {part!r} in {line!r}")
        descriptors.append((_ident(m.group(1)), int(m.group(2))))
    m = _DESCRIPTOR.match(rhs)
    if not m:
        raise ValueError(f"bad decision {rhs!r} in {line!r}")
    return DecisionRule(tuple(descriptors), int(m.group(2)), decision_name=_ident(m.group(1)))


def format_rules(rules: Sequence[DecisionRule]) -> str:
    return "".join(format_rule(r) + "\n" for r in rules)


def parse_rules(text: str) -> list[DecisionRule]:
    return [parse_rule(line) for line in text.splitlines() if line.strip() and "=>" in line]


def rules_to_json(rules: Sequence[DecisionRule], default: int | None = None) -> str:
    doc = {
        "default_decision": default if default is not None or not rules else default_decision(rules),
        "rules": [r.to_json() for r in rules],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def rules_from_json(text: str) -> tuple[list[DecisionRule], int | None]:
    doc = json.loads(text)
    return [DecisionRule.from_json(r) for r in doc["rules"]], doc.get("default_decision")
