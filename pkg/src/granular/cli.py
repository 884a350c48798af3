"""Command-line front end.

Every command writes its artifacts into an output directory together with a
``manifest.json`` that records the resolved arguments, input digests and
seed. ``granular rerun DIR/manifest.json`` repeats the run.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import anfis, rough, sonfis
from .discretize import Discretizer, discretize_table
from .errors import GranularError, IndexOutOfRange, SchemaMismatch
from .synthetic import KNOWN_SPECS, generate_synthetic
from .table import InformationTable, SplitSpec, infer_schema, load_table, split_train_test, write_csv

DEFAULT_SEED = 42
MANIFEST = "manifest.json"


# --------------------------------------------------------------------------
# io helpers


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def digest(path: Path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_table(path: Path, decision: str | None = None, known: bool = True) -> InformationTable:
    """Load a CSV, inferring the schema.

    With ``known`` the standard categorical attributes keep their label codes;
    categorized tables are read with ``known=False`` since their cells are
    already ordinal codes.
    """
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise SchemaMismatch(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    schema = infer_schema(header, rows[1:], KNOWN_SPECS if known else None)
    try:
        return load_table(text, schema, decision=decision)
    except GranularError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("GRANULAR_SEED")
    return int(env) if env else DEFAULT_SEED


class Run:
    """Collects artifacts for one command and writes its manifest."""

    def __init__(self, command: str, out: Path, argv: list[str], seed: int | None, config: dict):
        self.command = command
        self.out = Path(out)
        self.argv = argv
        self.seed = seed
        self.config = config
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}

    def input(self, path) -> Path:
        self.inputs[str(path)] = digest(path)
        return Path(path)

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        write_atomic(path, text)
        self.outputs[name] = "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()
        return path

    def finish(self) -> Path:
        manifest = {
            "command": self.command,
            "argv": self.argv,
            "config": self.config,
            "seed": self.seed,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        return self.write(MANIFEST, dump_json(manifest))


# --------------------------------------------------------------------------
# commands


def cmd_generate(args, run: Run):
    table = generate_synthetic(args.rows, run.seed)
    run.write("table.csv", write_csv(table))


def _load_inputs(args, run: Run) -> tuple[InformationTable, InformationTable | None]:
    """Training table plus optional test table, from --train/--test or --split."""
    if args.table is not None:
        table = read_table(run.input(args.table), args.decision)
        if args.split is None:
            return table, None
        return split_train_test(table, SplitSpec(args.split, run.seed))
    if args.train is None:
        raise SchemaMismatch("give a table path, or --train (and --test)")
    train = read_table(run.input(args.train), args.decision)
    test = read_table(run.input(args.test), args.decision) if args.test else None
    return train, test


def cmd_discretize(args, run: Run):
    train, test = _load_inputs(args, run)
    if args.apply:
        disc = Discretizer.from_json(json.loads(run.input(args.apply).read_text()))
        coded = disc.apply(train)
    else:
        coded, disc = discretize_table(train, args.categories, run.seed)
        run.write("discretizer.json", disc.dumps())
    run.write("categorized.csv", write_csv(coded))
    if test is not None:
        run.write("test_categorized.csv", write_csv(disc.apply(test)))
    if args.split is not None:
        run.write("train.csv", write_csv(train))
        run.write("test.csv", write_csv(test))


def _reduct_artifacts(table: InformationTable, run: Run, fmt: str = "text"):
    matrix = rough.discernibility_matrix(table)
    red = rough.johnson_reduct(matrix)
    rules = rough.induce_rules(table, red)
    default = rough.default_decision(rules)
    cnf = rough.discernibility_function(matrix)
    run.write(
        "reduct.json",
        dump_json(
            {
                "reduct": list(red.attributes),
                "positions": list(red.positions),
                "clauses": len(cnf.clauses),
                "n_objects": len(table),
            }
        ),
    )
    run.write("rules.txt", rough.format_rules(rules))
    run.write("rules.json", rough.rules_to_json(rules, default))
    run.write(
        "rule_stats.json",
        dump_json(
            {
                "n_rules": len(rules),
                "default_decision": default,
                "mean_support": float(np.mean([r.support for r in rules])),
                "mean_accuracy": float(np.mean([r.accuracy for r in rules])),
                "consistent_rules": sum(r.accuracy == 1.0 for r in rules),
                "rules": [
                    {"rule": k, "support": r.support, "accuracy": r.accuracy}
                    for k, r in enumerate(rules)
                ],
            }
        ),
    )
    if fmt == "json":
        sys.stdout.write(rough.rules_to_json(rules, default))
    elif fmt == "text":
        sys.stdout.write(rough.format_rules(rules))
    return red, rules, default


def cmd_reduct(args, run: Run):
    table = read_table(run.input(args.table), args.decision, known=False)
    _reduct_artifacts(table, run, args.format)


def _load_rules(path: Path) -> tuple[list[rough.DecisionRule], int | None]:
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return rough.rules_from_json(text)
    return rough.parse_rules(text), None


def cmd_classify(args, run: Run):
    rules, default = _load_rules(run.input(args.rules))
    test = read_table(run.input(args.test), args.decision, known=False)
    report = rough.evaluate(rules, test, default)
    run.write("predictions.json", dump_json(report.to_json()))
    sys.stdout.write(f"accuracy {report.accuracy:.4f} on {len(test)} objects\n")


def _sonfis_config(args, seed: int) -> sonfis.SonfisConfig:
    lo, hi = (int(v) for v in args.neuron_range.split(":"))
    return sonfis.SonfisConfig(
        granule_min=lo,
        granule_max=hi,
        max_rules=args.max_rules,
        iterations_per_rule_count=args.iterations,
        nfis_epochs=args.epochs,
        seed=seed,
    )


def _sonfis_artifacts(train, test, config, run: Run):
    result = sonfis.run_sonfis_r(train, test, config)
    run.write("sonfis_result.json", result.dumps())
    lines = ["step,n_neurons,n_rules_requested,n_rules,mse"]
    lines += [
        f"{r.step},{r.n_neurons},{r.n_rules_requested},{r.n_rules},{r.mse!r}" for r in result.trace
    ]
    run.write("trace.csv", "\n".join(lines) + "\n")
    mfs = anfis.membership_table(result.tsk, list(train.names))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, ["input", "mf", "rule", "center", "sigma"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(mfs)
    run.write("memberships.csv", buf.getvalue())
    run.write("tsk_rules.txt", anfis.format_rules(result.tsk))
    b = result.best
    sys.stdout.write(
        f"best step {b.step}: {b.n_neurons} neurons, {b.n_rules} rules, test MSE {b.mse:.6g}\n"
    )
    return result


def cmd_sonfis(args, run: Run):
    train, test = _load_inputs(args, run)
    if test is None:
        raise SchemaMismatch("SONFIS-R needs a test table (--test or --split)")
    _sonfis_artifacts(train, test, _sonfis_config(args, run.seed), run)


def cmd_surface(args, run: Run):
    doc = json.loads(run.input(args.model).read_text())
    names: list[str]
    if "best" in doc:
        result = sonfis.SonfisResult.from_json(doc)
        model = result.tsk
        names = list(result.attribute_names)
        baseline = np.array(result.train_mean) if result.train_mean else None
        ranges = np.array(result.train_range) if result.train_range else None
    else:
        model = anfis.TskModel.from_json(doc)
        names = [f"in{i + 1}" for i in range(model.input_dim)]
        baseline = ranges = None
    axes = [a.strip() for a in args.attrs.split(",")]
    if len(axes) != 2:
        raise IndexOutOfRange("--attrs takes exactly two attribute names")
    idx = []
    for a in axes:
        if a in names:
            idx.append(names.index(a))
        elif a.isdigit():
            idx.append(int(a))
        else:
            raise IndexOutOfRange(f"unknown attribute {a!r}; model inputs are {names}")
    surf = sonfis.response_surface(model, idx[0], idx[1], args.grid, baseline, ranges)
    run.write("surface.csv", surf.to_csv((names[idx[0]], names[idx[1]])))


def cmd_pipeline(args, run: Run):
    """Split, discretize, reduce, classify, then SONFIS-R on the raw split."""
    if args.table is None:
        raise SchemaMismatch("pipeline needs a table path")
    table = read_table(run.input(args.table), args.decision)
    train, test = split_train_test(table, SplitSpec(args.split, run.seed))
    run.write("train.csv", write_csv(train))
    run.write("test.csv", write_csv(test))

    coded_train, disc = discretize_table(train, args.categories, run.seed)
    coded_test = disc.apply(test)
    run.write("discretizer.json", disc.dumps())
    run.write("categorized.csv", write_csv(coded_train))
    run.write("test_categorized.csv", write_csv(coded_test))

    _, rules, default = _reduct_artifacts(coded_train, run, fmt="none")
    report = rough.evaluate(rules, coded_test, default)
    run.write("predictions.json", dump_json(report.to_json()))
    sys.stdout.write(f"RST accuracy {report.accuracy:.4f} on {len(coded_test)} test objects\n")

    _sonfis_artifacts(train, test, _sonfis_config(args, run.seed), run)


# --------------------------------------------------------------------------
# argument parsing


def _add_table_inputs(p, split_default=None):
    p.add_argument("table", nargs="?", type=Path, help="single CSV (use with --split)")
    p.add_argument("--train", type=Path)
    p.add_argument("--test", type=Path)
    p.add_argument("--split", type=int, default=split_default, metavar="N_TRAIN")


def _add_sonfis_flags(p):
    p.add_argument("--max-rules", type=int, default=4)
    p.add_argument("--iterations", type=int, default=15)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--neuron-range", default="5:20", metavar="MIN:MAX")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="granular", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--seed", type=int, default=None, help="master seed (env GRANULAR_SEED, else 42)")
        p.add_argument("--decision", default=None, help="decision column (default: last)")
        p.add_argument("--out", type=Path, required=True, help="output directory")
        return p

    p = command("generate", cmd_generate, "write a synthetic dilution table")
    p.add_argument("--rows", type=int, default=30)

    p = command("discretize", cmd_discretize, "SOM-discretize condition attributes")
    _add_table_inputs(p)
    p.add_argument("--categories", type=int, default=3)
    p.add_argument("--apply", type=Path, help="reuse a fitted discretizer.json")

    p = command("reduct", cmd_reduct, "Johnson reduct and rule induction")
    p.add_argument("table", type=Path)
    p.add_argument("--format", choices=("json", "text"), default="text")

    p = command("classify", cmd_classify, "apply rules to a categorized table")
    p.add_argument("--rules", type=Path, required=True)
    p.add_argument("--test", type=Path, required=True)

    p = command("sonfis", cmd_sonfis, "run the SONFIS-R search")
    _add_table_inputs(p)
    _add_sonfis_flags(p)

    p = command("surface", cmd_surface, "response surface of a trained model")
    p.add_argument("model", type=Path, help="sonfis_result.json or TSK model JSON")
    p.add_argument("--attrs", required=True, help="two attribute names, comma-separated")
    p.add_argument("--grid", type=int, default=20)

    p = command("pipeline", cmd_pipeline, "discretize -> reduct -> classify, plus SONFIS-R")
    p.add_argument("table", nargs="?", type=Path)
    p.add_argument("--split", type=int, default=21, metavar="N_TRAIN")
    p.add_argument("--categories", type=int, default=3)
    _add_sonfis_flags(p)

    p = sub.add_parser("rerun", help="repeat a run from its manifest")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out", type=Path, default=None, help="default: the manifest's directory")
    p.set_defaults(func=None)
    return parser


def _strip_out(argv: list[str]) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--out":
            skip = True
            continue
        if a.startswith("--out="):
            continue
        out.append(a)
    return out


def _config_of(args) -> dict:
    skip = {"func", "out", "command", "seed"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rerun":
            manifest = json.loads(args.manifest.read_text())
            out = args.out or args.manifest.parent
            replay = list(manifest["argv"]) + ["--out", str(out)]
            if "--seed" not in replay and manifest.get("seed") is not None:
                replay += ["--seed", str(manifest["seed"])]
            return main(replay)
        seed = resolve_seed(args.seed)
        argv_clean = _strip_out(argv)
        if "--seed" not in argv_clean:
            argv_clean += ["--seed", str(seed)]
        run = Run(args.command, args.out, argv_clean, seed, _config_of(args))
        args.func(args, run)
        run.finish()
    except (GranularError, OSError, ValueError) as exc:
        print(f"granular: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
