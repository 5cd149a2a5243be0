"""Command-line surface: generate | select | bench."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import run_bench
from .data import CLASSIFICATION, REGRESSION, load_csv, save_csv
from .decompose import PipelineConfig, decompose
from .forest import fit, forest_to_json
from .synth import PRESET_NAMES, generate, preset


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsdecomp",
        description="Classify dataset features as strongly relevant, weakly relevant or irrelevant.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic benchmark dataset and its ground truth")
    gen.add_argument("--preset", required=True, help=f"one of: {', '.join(PRESET_NAMES)}")
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.add_argument("--truth", help="optional ground-truth JSON sidecar path")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--target", default="y", help="target column name (default y)")

    sel = sub.add_parser("select", help="decompose a CSV dataset's features")
    sel.add_argument("--input", required=True, help="input CSV path")
    sel.add_argument("--target", default="y", help="target column name (default y)")
    sel.add_argument("--task", default=CLASSIFICATION, choices=[CLASSIFICATION, REGRESSION])
    sel.add_argument("--out", help="report JSON path (default: stdout)")
    sel.add_argument("--alpha", type=int, default=50, help="null-distribution sample count")
    sel.add_argument("--p-value", type=float, default=1e-6, help="interval significance parameter")
    sel.add_argument("--seed", type=int, default=0)
    sel.add_argument("--boruta-max-iter", type=int, default=100)
    sel.add_argument("--boruta-level", type=float, default=0.05)
    sel.add_argument("--n-trees", type=int, default=100)
    sel.add_argument("--print-table", action="store_true", help="also print a per-feature table")
    sel.add_argument("--dump-forest", help="debug: dump a reference forest fit on the full data as JSON")

    ben = sub.add_parser("bench", help="run benchmark presets and emit CSV/JSON reports")
    ben.add_argument("--presets", required=True, help="comma-separated preset names, e.g. Set1,Set2,NL1")
    ben.add_argument("--repeats", type=int, default=10)
    ben.add_argument("--methods", default="sq", help="comma-separated subset of: sq,rfe")
    ben.add_argument("--out-dir", required=True)
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--folds", type=int, default=5, help="CV folds for the RFE baseline")
    ben.add_argument("--alpha", type=int, default=50)
    ben.add_argument("--p-value", type=float, default=1e-6)
    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    spec = preset(args.preset)
    ds, truth = generate(spec, np.random.default_rng(args.seed))
    save_csv(ds, args.out, target_column=args.target)
    if args.truth:
        truth.save(args.truth)
    print(f"wrote {ds.n}x{ds.d} dataset to {args.out}" + (f", truth to {args.truth}" if args.truth else ""))
    return 0


def _cmd_select(args: argparse.Namespace) -> int:
    ds = load_csv(args.input, target_column=args.target, task=args.task)
    config = PipelineConfig(
        n_trees=args.n_trees,
        alpha=args.alpha,
        p_value=args.p_value,
        boruta_max_iter=args.boruta_max_iter,
        boruta_test_level=args.boruta_level,
        seed=args.seed,
    )
    report = decompose(ds, config)
    payload = json.dumps(report.to_json(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    if args.print_table:
        _print_table(ds.names, report)
    if args.dump_forest:
        ref = fit(config.loss_params(), ds, np.random.default_rng(args.seed))
        Path(args.dump_forest).write_text(json.dumps(forest_to_json(ref)) + "\n", encoding="utf-8")
    return 0


def _print_table(names, report) -> None:
    classes = {}
    for j in report.strong:
        classes[j] = "strong"
    for j in report.weak:
        classes[j] = "weak"
    for j in report.irrelevant:
        classes[j] = "irrelevant"
    imps = report.diagnostics.importances
    reduced = report.diagnostics.reduced_scores
    width = max(len(n) for n in names)
    print(f"{'feature':<{width}}  {'class':<10}  {'importance':>10}  {'reduced_score':>13}")
    for j, name in enumerate(names):
        imp = f"{imps[j]:.4f}" if j in imps else "-"
        red = f"{reduced[j]:.4f}" if j in reduced else "-"
        print(f"{name:<{width}}  {classes[j]:<10}  {imp:>10}  {red:>13}")


def _cmd_bench(args: argparse.Namespace) -> int:
    config = PipelineConfig(alpha=args.alpha, p_value=args.p_value)
    result = run_bench(
        [p for p in args.presets.split(",") if p],
        repeats=args.repeats,
        methods=[m for m in args.methods.split(",") if m],
        master_seed=args.seed,
        out_dir=args.out_dir,
        config=config,
        folds=args.folds,
    )
    for agg in result.aggregates:
        f1 = agg["f1"]
        rec = agg["recall"]
        print(
            f"{agg['preset']:>6} {agg['method']:>4}: "
            f"f1={f1 if f1 is None else f'{f1:.3f}'} recall={rec if rec is None else f'{rec:.3f}'} "
            f"({agg['repeats']} repeats)"
        )
    print(f"reports written to {args.out_dir}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "select":
            return _cmd_select(args)
        return _cmd_bench(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
