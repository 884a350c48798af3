import numpy as np
import pytest

from granular.synthetic import load_bundled
from granular.table import AttributeSpec, InformationTable, SplitSpec, split_train_test


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance" not in rep.nodeid:
                continue
            label = dict(rep.user_properties).get("criterion", rep.nodeid)
            lines.append((label, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for label, status in sorted(lines, key=lambda t: int(t[0].split(":")[0][2:])):
            terminalreporter.write_line(f"[{status}] {label}")


def make_table(codes, decisions, names=None):
    """Categorical table from a list of condition-code rows and decisions."""
    codes = [list(r) for r in codes]
    names = names or [f"a{k}" for k in range(len(codes[0]))]
    rows = tuple(tuple(int(v) for v in r) + (int(d),) for r, d in zip(codes, decisions))
    return InformationTable(
        attributes=tuple(AttributeSpec(n) for n in names),
        decision=AttributeSpec("d"),
        rows=rows,
    )


def random_table(rng, max_objects=10, max_attrs=6, max_cats=3, min_objects=2):
    n = int(rng.integers(min_objects, max_objects + 1))
    m = int(rng.integers(1, max_attrs + 1))
    k = int(rng.integers(1, max_cats + 1))
    C = rng.integers(1, k + 1, size=(n, m))
    d = rng.integers(1, int(rng.integers(1, 3)) + 2, size=n)
    return make_table(C, d)


@pytest.fixture(scope="session")
def bundled():
    return load_bundled()


@pytest.fixture(scope="session")
def bundled_split(bundled):
    return split_train_test(bundled, SplitSpec(21, 42))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_tsk(rng, max_rules=4, max_inputs=4):
    """Random TSK model over inputs in [0, 10] plus a point inside the box."""
    from granular.anfis import TskModel

    k = int(rng.integers(2, max_rules + 1))
    d = int(rng.integers(1, max_inputs + 1))
    model = TskModel(
        rng.uniform(0, 1, (k, d)),
        rng.uniform(0.2, 0.8, (k, d)),
        rng.normal(size=(k, d + 1)),
        np.column_stack([np.zeros(d), np.full(d, 10.0)]),
    )
    return model, rng.uniform(0, 10, d), float(rng.normal())


def central_difference(model, x, y, h=1e-6):
    from granular.anfis import forward

    theta = model.premise_vector()
    grad = np.empty_like(theta)
    for p in range(theta.size):
        up, dn = theta.copy(), theta.copy()
        up[p] += h
        dn[p] -= h
        e_up = (forward(model.with_premises(up), x) - y) ** 2
        e_dn = (forward(model.with_premises(dn), x) - y) ** 2
        grad[p] = (e_up - e_dn) / (2 * h)
    return grad


def gradient_agrees(analytic, numeric, rtol=1e-4, floor=1e-7):
    scale = max(np.max(np.abs(numeric)), floor)
    return bool(np.all(np.abs(analytic - numeric) <= rtol * scale))
