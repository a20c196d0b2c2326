"""Command-line front end over CSV files.

Subcommands: ``fit`` (single-penalty L1 Cox fit), ``path`` (geometric lambda
path with cross-validation), ``eval`` (concordance index), ``split``
(stratified train/test split), ``bench`` (NLL scaling benchmark).

Results go to stdout; warnings and errors go to stderr.  Exit codes: 0 on
success, 1 on data/runtime errors, 2 on usage errors.  ``--out`` writes the
same report as JSON with snake_case keys:

    {"command": ..., "parameters": {...}, "results": {...},
     "warnings": [...], "wall_time_ms": ...}

Numbers are printed with full ``repr`` precision so text and JSON carry
identical values.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import data as data_mod
from . import loss, model
from .concordance import CIndexOptions, c_index_fast
from .exceptions import CoxKitError, DataWarning
from .loss import TieMethod

__all__ = ["RunReport", "build_parser", "main", "entrypoint"]


@dataclass
class RunReport:
    command: str
    parameters: dict
    results: dict
    warnings: list[str] = field(default_factory=list)
    wall_time_ms: float = 0.0

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "warnings": self.warnings,
            "wall_time_ms": self.wall_time_ms,
        }
        return json.dumps(payload, indent=2)

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for key, value in self.parameters.items():
            lines.append(f"  {key} = {value!r}")
        lines.append(_format_results(self.command, self.results))
        return "\n".join(lines)


def _fmt(value) -> str:
    # repr keeps the full float so text and JSON values match exactly
    return repr(value)


def _table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[_fmt(v) if isinstance(v, float) else str(v) for v in row]
                        for row in rows]
    widths = [max(len(r[c]) for r in cells) for c in range(len(header))]
    out = []
    for r, row in enumerate(cells):
        out.append("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)))
        if r == 0:
            out.append("  ".join("-" * widths[c] for c in range(len(header))))
    return "\n".join(out)


def _format_results(command: str, results: dict) -> str:
    if command == "fit":
        rows = [[b["feature"], b["coefficient"]] for b in results["beta"]]
        return "\n".join([
            _table(["feature", "coefficient"], rows),
            f"n_selected: {results['n_selected']}",
            f"train_nll: {_fmt(results['train_nll'])}",
        ])
    if command == "path":
        rows = [
            [s["lambda"], s["n_selected"],
             "" if s["cv_cindex"] is None else _fmt(s["cv_cindex"]),
             "*" if s["best"] else ""]
            for s in results["steps"]
        ]
        parts = [_table(["lambda", "n_selected", "cv_cindex", "best"], rows)]
        if results["best_lambda"] is not None:
            parts.append(f"best_lambda: {_fmt(results['best_lambda'])}")
            beta_rows = [[b["feature"], b["coefficient"]]
                         for b in results["best_beta"] if b["coefficient"] != 0.0]
            parts.append("selected coefficients at best lambda:")
            parts.append(_table(["feature", "coefficient"], beta_rows))
        return "\n".join(parts)
    if command == "eval":
        return f"c_index: {_fmt(results['c_index'])}"
    if command == "split":
        return "\n".join([
            f"train: {results['train']}",
            f"test: {results['test']}",
        ])
    if command == "bench":
        rows = [[r["n"], r["method"], r["median_ns"], r["reps"]]
                for r in results["rows"]]
        return _table(["n", "method", "median_ns", "reps"], rows)
    return json.dumps(results, indent=2)


def _beta_entries(names: list[str], beta: np.ndarray) -> list[dict]:
    return [{"feature": name, "coefficient": float(b)}
            for name, b in zip(names, beta)]


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="input CSV file")
    p.add_argument("--time", required=True, help="duration column name")
    p.add_argument("--event", required=True, help="event indicator column name")
    p.add_argument("--features", default=None,
                   help="comma-separated feature columns (default: all others)")


def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ties", choices=["breslow", "efron"], default="efron",
                   help="tie handling for the loss (default efron)")
    p.add_argument("--no-standardize", action="store_true",
                   help="fit on raw feature scales")
    p.add_argument("--out", default=None, help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coxkit",
        description="L1 Cox models, concordance, and scaling benchmarks over CSV files",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a single L1-penalized Cox model")
    _add_data_flags(p_fit)
    p_fit.add_argument("--lambda", dest="lambda_", type=float, required=True,
                       help="L1 penalty strength")
    _add_fit_flags(p_fit)

    p_path = sub.add_parser("path", help="traverse a geometric lambda path")
    _add_data_flags(p_path)
    _add_fit_flags(p_path)
    p_path.add_argument("--lambda-start", default="auto",
                        help="starting penalty, or 'auto' for lambda_max/10")
    p_path.add_argument("--multiplier", type=float, default=1.02,
                        help="geometric step between penalties (must exceed 1)")
    p_path.add_argument("--cv", type=int, default=5,
                        help="cross-validation folds (1 disables CV)")
    p_path.add_argument("--seed", type=int, default=0)

    p_eval = sub.add_parser("eval", help="concordance index of given scores")
    _add_data_flags(p_eval)
    p_eval.add_argument("--scores", required=True,
                        help="column name in --data, or a file with one score per row")
    p_eval.add_argument("--tied-score-credit", type=float, default=0.0,
                        choices=[0.0, 0.5])
    p_eval.add_argument("--out", default=None, help="write the JSON report here")

    p_split = sub.add_parser("split", help="stratified train/test split")
    _add_data_flags(p_split)
    p_split.add_argument("--fraction", type=float, required=True,
                         help="train fraction in (0, 1)")
    p_split.add_argument("--seed", type=int, required=True)
    p_split.add_argument("--out-train", required=True)
    p_split.add_argument("--out-test", required=True)
    p_split.add_argument("--out", default=None, help="write the JSON report here")

    p_bench = sub.add_parser("bench", help="NLL runtime scaling benchmark")
    p_bench.add_argument("--sizes", default=None,
                         help="comma-separated sizes (default 64..16384, powers of 2)")
    p_bench.add_argument("--reps", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--format", choices=["csv", "json"], default="csv",
                         help="file format used with --out")
    p_bench.add_argument("--out", default=None, help="write the report here")
    return parser


def _parse_features(arg: str | None) -> list[str] | None:
    if arg is None:
        return None
    cols = [c.strip() for c in arg.split(",") if c.strip()]
    return cols or None


def _load_dataset(args) -> data_mod.SurvivalDataset:
    ds = data_mod.load_csv(args.data, args.time, args.event,
                           _parse_features(args.features))
    if ds.n_events == 0:
        warnings.warn("all events are censored; the partial likelihood is "
                      "identically zero", DataWarning, stacklevel=2)
    return ds


def _fit_options(args) -> model.FitOptions:
    return model.FitOptions(
        tie_method=TieMethod(args.ties),
        standardize=not args.no_standardize,
    )


def _cmd_fit(args) -> RunReport:
    ds = _load_dataset(args)
    opts = _fit_options(args)
    beta = model.fit(ds.features, ds.durations, ds.events, args.lambda_, opts)
    order = loss.build_risk_order(ds.durations, ds.events)
    train_nll = loss.nll(order, ds.features @ beta, opts.tie_method).nll
    results = {
        "beta": _beta_entries(ds.feature_names, beta),
        "n_selected": int(np.count_nonzero(beta)),
        "train_nll": float(train_nll),
    }
    params = {"data": args.data, "time": args.time, "event": args.event,
              "features": args.features, "lambda": args.lambda_,
              "ties": args.ties, "standardize": not args.no_standardize}
    return RunReport("fit", params, results)


def _cmd_path(args, parser: argparse.ArgumentParser) -> RunReport:
    if args.lambda_start != "auto":
        try:
            lambda_start = float(args.lambda_start)
        except ValueError:
            parser.error("--lambda-start must be a positive real or 'auto'")
        if lambda_start <= 0:
            parser.error("--lambda-start must be a positive real or 'auto'")
    else:
        lambda_start = "auto"
    if args.multiplier <= 1.0:
        parser.error("--multiplier must exceed 1")
    if args.cv < 1:
        parser.error("--cv must be a positive integer")

    ds = _load_dataset(args)
    popts = model.PathOptions(lambda_start=lambda_start,
                              path_multiplier=args.multiplier,
                              cv_folds=args.cv, seed=args.seed)
    result = model.lasso_path(ds.features, ds.durations, ds.events,
                              popts, _fit_options(args))
    steps = [
        {"lambda": float(s.lambda_), "n_selected": s.n_selected,
         "cv_cindex": s.cv_cindex,
         "best": result.best_lambda is not None and s.lambda_ == result.best_lambda}
        for s in result.steps
    ]
    results = {
        "steps": steps,
        "best_lambda": result.best_lambda,
        "best_beta": (None if result.best_beta is None
                      else _beta_entries(ds.feature_names, result.best_beta)),
    }
    params = {"data": args.data, "time": args.time, "event": args.event,
              "features": args.features, "lambda_start": args.lambda_start,
              "multiplier": args.multiplier, "cv": args.cv, "seed": args.seed,
              "ties": args.ties, "standardize": not args.no_standardize}
    return RunReport("path", params, results)


def _read_scores(ds: data_mod.SurvivalDataset, spec: str) -> np.ndarray:
    if spec in ds.feature_names:
        return ds.features[:, ds.feature_names.index(spec)]
    path = Path(spec)
    if not path.exists():
        raise CoxKitError(
            f"--scores {spec!r} is neither a feature column nor an existing file"
        )
    values = [float(line) for line in path.read_text().split()]
    if len(values) != ds.n:
        raise CoxKitError(
            f"scores file has {len(values)} values but the dataset has {ds.n} rows"
        )
    return np.asarray(values)


def _cmd_eval(args) -> RunReport:
    ds = _load_dataset(args)
    scores = _read_scores(ds, args.scores)
    opts = CIndexOptions(tied_score_credit=args.tied_score_credit)
    value = c_index_fast(ds.durations, ds.events, scores, opts)
    params = {"data": args.data, "time": args.time, "event": args.event,
              "scores": args.scores, "tied_score_credit": args.tied_score_credit}
    return RunReport("eval", params, {"c_index": float(value)})


def _cmd_split(args) -> RunReport:
    ds = _load_dataset(args)
    train, test = data_mod.stratified_split(ds, args.fraction, args.seed)
    data_mod.save_csv(train, args.out_train, args.time, args.event)
    data_mod.save_csv(test, args.out_test, args.time, args.event)
    def counts(part):
        return {"rows": part.n, "events": part.n_events,
                "censored": part.n - part.n_events}
    results = {"train": counts(train), "test": counts(test),
               "out_train": args.out_train, "out_test": args.out_test}
    params = {"data": args.data, "time": args.time, "event": args.event,
              "fraction": args.fraction, "seed": args.seed}
    return RunReport("split", params, results)


def _cmd_bench(args, parser: argparse.ArgumentParser) -> RunReport:
    if args.sizes is None:
        sizes = list(bench_mod.DEFAULT_SIZES)
    else:
        try:
            sizes = [int(v) for v in args.sizes.split(",") if v.strip()]
        except ValueError:
            parser.error("--sizes must be a comma-separated list of integers")
    if args.reps < 3:
        parser.error("--reps must be >= 3")
    report = bench_mod.run_scaling_bench(sizes, reps=args.reps, seed=args.seed)
    if args.out:
        bench_mod.emit_report(report, args.out, args.format)
    rows = [{"n": r.n, "method": r.method, "median_ns": r.median_ns,
             "reps": r.reps} for r in report.rows]
    params = {"sizes": sizes, "reps": args.reps, "seed": args.seed,
              "format": args.format, "out": args.out}
    return RunReport("bench", params, {"rows": rows})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            if args.command == "fit":
                report = _cmd_fit(args)
            elif args.command == "path":
                report = _cmd_path(args, parser)
            elif args.command == "eval":
                report = _cmd_eval(args)
            elif args.command == "split":
                report = _cmd_split(args)
            else:
                report = _cmd_bench(args, parser)
        except (CoxKitError, OSError) as exc:
            for w in caught:
                print(f"warning: {w.message}", file=sys.stderr)
            print(f"error: {exc}", file=sys.stderr)
            return 1
    report.warnings = [str(w.message) for w in caught]
    report.wall_time_ms = (time.perf_counter() - started) * 1e3
    for message in report.warnings:
        print(f"warning: {message}", file=sys.stderr)
    print(report.to_text())
    out = getattr(args, "out", None)
    if out and args.command != "bench":  # bench --out is the data file itself
        Path(out).write_text(report.to_json() + "\n", encoding="utf-8")
    return 0


def entrypoint() -> None:
    sys.exit(main())
