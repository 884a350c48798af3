"""Exit criteria for the build, one test per criterion.

Each test records its label; ``conftest.py`` prints one PASS/FAIL line per
criterion at the end of the run. Wall-clock limits are asserted inside each
test.
"""

import itertools
import json
import re
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

import oracles
from conftest import central_difference, gradient_agrees, random_table, random_tsk
from granular import cli
from granular.anfis import TskModel, hybrid_train, init_from_clusters, premise_gradient
from granular.clustering import ClusterSet, SubtractiveConfig, minmax_scale, subtractive_cluster
from granular.discretize import discretize_table
from granular.rough import (
    all_reducts,
    discernibility_matrix,
    indiscernibility,
    johnson_reduct,
    lower_approx,
    upper_approx,
)
from granular.sonfis import mse
from granular.synthetic import SENSITIVE, generate_synthetic, load_bundled

BUNDLED = Path(cli.__file__).parent / "data" / "synthetic_30.csv"
RULE_LINE = re.compile(r"^[a-z][a-z &]*\(\d+\)( AND [a-z][a-z &]*\(\d+\))* => dilution\(\d+\)$")


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, limit {seconds}s"


@pytest.fixture
def label(record_property):
    def set_label(text):
        record_property("criterion", text)

    return set_label


def table_codes(t):
    return [[int(v) for v in r[:-1]] for r in t.rows], [int(r[-1]) for r in t.rows]


def test_ac1_reduct_oracles(label):
    label("AC1: Johnson is a minimal hitting set; all_reducts = truth-table prime implicants")
    rng = np.random.default_rng(1)
    with budget(30):
        for _ in range(250):
            t = random_table(rng, max_objects=10, max_attrs=6, max_cats=3)
            codes, dec = table_codes(t)
            clauses = [c for c in oracles.pairwise_clauses(codes, dec).values() if c]
            m = discernibility_matrix(t)
            red = johnson_reduct(m)
            assert oracles.is_minimal_hitting_set(clauses, set(red.positions))
            expected = oracles.truth_table_prime_implicants(clauses, len(t.names))
            assert {frozenset(r.positions) for r in all_reducts(m)} == expected


def test_ac2_approximation_laws(label):
    label("AC2: lower <= X <= upper and monotonicity in B")
    rng = np.random.default_rng(2)
    with budget(10):
        for _ in range(1200):
            t = random_table(rng)
            n, m = len(t), len(t.names)
            U = list(t.ids)
            X = {u for u in U if rng.random() < 0.5}
            B = {a for a in range(m) if rng.random() < 0.5}
            B2 = B | {a for a in range(m) if rng.random() < 0.5}
            lo, up = lower_approx(t, B, X), upper_approx(t, B, X)
            assert lo <= X <= up
            assert lo <= lower_approx(t, B2, X)
            assert upper_approx(t, B2, X) <= up
            assert len(lo) <= len(up) <= n


def test_ac3_refinement_identity(label):
    label("AC3: I_B equals the common refinement of single-attribute partitions")
    rng = np.random.default_rng(3)
    with budget(10):
        for _ in range(250):
            t = random_table(rng)
            m = len(t.names)
            B = [a for a in range(m) if rng.random() < 0.6]
            joint = indiscernibility(t, [])
            for a in B:
                # blockwise intersection, computed here rather than via Partition.refine
                single = indiscernibility(t, [a])
                joint_blocks = {x & y for x in joint.blocks for y in single.blocks if x & y}
                joint = type(joint)(tuple(joint_blocks))
            assert set(indiscernibility(t, B).blocks) == set(joint.blocks)


def test_ac4_gradient_check(label):
    label("AC4: analytic premise gradients match central differences (rel 1e-4)")
    rng = np.random.default_rng(4)
    with budget(10):
        for _ in range(120):
            model, x, y = random_tsk(rng)
            assert gradient_agrees(premise_gradient(model, x, y), central_difference(model, x, y))
        for _ in range(20):
            d = int(rng.integers(1, 4))
            single = TskModel(rng.uniform(size=(1, d)), rng.uniform(0.1, 1, (1, d)),
                              rng.normal(size=(1, d + 1)), [[0, 1]] * d)
            assert np.all(premise_gradient(single, rng.uniform(size=d), rng.normal()) == 0.0)


def test_ac5_hybrid_training(label):
    label("AC5: one LSE pass recovers y=2x+1; lr=0 training MSE non-increasing")
    with budget(5):
        X = np.linspace(-3, 4, 40)[:, None]
        y = 2 * X[:, 0] + 1
        cs = ClusterSet(np.array([[0.5]]), np.ones(1), (0,), SubtractiveConfig())
        model, _ = hybrid_train(init_from_clusters(cs, (X, y)), (X, y), epochs=1)
        assert np.all(np.abs(model.consequents[0] - [2.0, 1.0]) <= 1e-6)

        t = load_bundled()
        Z, bounds = minmax_scale(np.column_stack([t.X, t.y]))
        start = init_from_clusters(subtractive_cluster(Z, max_clusters=4), (t.X, t.y), bounds[:-1])
        _, trace = hybrid_train(start, (t.X, t.y), epochs=20, learning_rate=0.0)
        assert len(trace) == 20
        assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_ac6_subtractive_first_centre(label):
    label("AC6: first centre is the brute-force max-potential point; single point is itself")
    rng = np.random.default_rng(6)
    with budget(10):
        for _ in range(150):
            X = rng.uniform(size=(int(rng.integers(1, 40)), int(rng.integers(1, 5))))
            cs = subtractive_cluster(X)
            best = oracles.argmax_first(oracles.potentials(X.tolist(), 0.5))
            assert cs.indices[0] == best
            assert np.array_equal(cs.centers[0], X[best])
        p = rng.uniform(size=(1, 3))
        one = subtractive_cluster(p)
        assert len(one) == 1 and np.array_equal(one.centers[0], p[0])


def test_ac7_discretization_shape(label):
    label("AC7: bundled 3-category discretization lies in {1,2,3} and is monotone per attribute")
    with budget(5):
        t = load_bundled()
        coded, _ = discretize_table(t, 3, 42)
        assert set(np.unique(coded.X).tolist()) <= {1, 2, 3}
        for c in range(len(t.names)):
            raw, code = t.X[:, c], coded.X[:, c]
            for i, j in itertools.product(range(len(t)), repeat=2):
                if raw[i] <= raw[j]:
                    assert code[i] <= code[j]


def test_ac8_default_pipeline(label, tmp_path, capsys):
    label("AC8: default pipeline gives a 45-step trace, argmin winner, rule grammar, identical reruns")
    with budget(120):
        for name in ("a", "b"):
            assert cli.main(["pipeline", str(BUNDLED), "--out", str(tmp_path / name)]) == 0
    capsys.readouterr()
    a, b = tmp_path / "a", tmp_path / "b"
    trace = (a / "trace.csv").read_text().splitlines()
    assert trace[0] == "step,n_neurons,n_rules_requested,n_rules,mse"
    assert len(trace) == 46
    result = json.loads((a / "sonfis_result.json").read_text())
    mses = [r["mse"] for r in result["trace"]]
    assert len(mses) == 45 and result["best"]["mse"] == min(mses)
    rules = (a / "rules.txt").read_text().splitlines()
    assert rules and all(RULE_LINE.match(r) for r in rules)
    names_a = sorted(p.name for p in a.iterdir())
    assert names_a == sorted(p.name for p in b.iterdir())
    for f in names_a:
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_ac9_ground_truth_recovery(label):
    label("AC9: Johnson reduct holds >= 4 of 5 generating attributes in >= 8 of 10 seeds")
    hits = []
    with budget(60):
        for seed in range(10):
            t = generate_synthetic(100, seed=seed)
            coded, _ = discretize_table(t, 3, seed)
            red = johnson_reduct(discernibility_matrix(coded))
            hits.append(len(set(red.attributes) & set(SENSITIVE)))
    assert sum(h >= 4 for h in hits) >= 8, hits


def test_ac10_mse(label):
    label("AC10: mse matches a summation oracle within 1e-12; {1,2} vs {2,2} is 0.5")
    rng = np.random.default_rng(10)
    with budget(1):
        assert mse([2, 2], [1, 2]) == 0.5
        for _ in range(200):
            n = int(rng.integers(1, 60))
            p, t = rng.normal(size=n), rng.normal(size=n)
            assert abs(mse(p, t) - oracles.mse(p.tolist(), t.tolist())) <= 1e-12
