"""Command-line front end.

Subcommands: fit-path, test, boxplot, simulate, baseline.  Data go to
stdout as JSON or comma-delimited tables; diagnostics go to stderr.
Exit codes: 0 success, 2 input error, 3 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from huberfamily import baselines, bands
from huberfamily.errors import DegenerateDataError, InputError
from huberfamily.familial import (DEFAULT_B, DEFAULT_SEED, LossMatrix,
                                  NullSpec, bootstrap_family,
                                  difference_family, independent_test,
                                  one_sample_test, paired_test)
from huberfamily.paths import WeightedSample, fit_path, fit_scaled_path, scale_path
from huberfamily.simulation import DistSpec, Scenario, rejection_curve

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


# ---------------------------------------------------------------- input

def _split(line: str, delimiter: str | None) -> list[str]:
    if delimiter is None:
        return line.split()
    return [cell.strip() for cell in line.split(delimiter)]


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def ingest_columns(path) -> list[np.ndarray]:
    """Read a delimited numeric file into its columns.

    Comma, tab and semicolon delimiters are detected from the first line;
    otherwise whitespace separates cells.  A first row with any
    non-numeric cell is taken as a header.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise InputError(f"{path}: file is empty")
    first = lines[0][1]
    delimiter = next((d for d in (",", "\t", ";") if d in first), None)
    if not all(_is_number(c) for c in _split(first, delimiter)):
        lines = lines[1:]
        if not lines:
            raise InputError(f"{path}: header but no data rows")
    width = None
    rows = []
    for lineno, line in lines:
        cells = _split(line, delimiter)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise InputError(
                f"{path}: row {lineno} has {len(cells)} columns, expected {width}")
        row = []
        for col, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise InputError(
                    f"{path}: row {lineno}, column {col}: {cell!r} is not a number"
                ) from None
            if not math.isfinite(value):
                raise InputError(
                    f"{path}: row {lineno}, column {col}: {cell!r} is not finite")
            row.append(value)
        rows.append(row)
    data = np.array(rows, dtype=float)
    return [data[:, j].copy() for j in range(data.shape[1])]


def _pair(text: str, what: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"{what} must look like 'low,high', got {text!r}") from None
    return lo, hi


def _samples(args) -> tuple[np.ndarray, np.ndarray | None]:
    """First and (for paired/two-sample modes) second sample."""
    cols = ingest_columns(args.data)
    two = getattr(args, "paired", False) or getattr(args, "two_sample", False)
    if args.data2 is not None:
        second = ingest_columns(args.data2)
        return cols[0], second[0]
    if two:
        if len(cols) < 2:
            raise InputError("paired/two-sample mode needs two columns or --data2")
        return cols[0], cols[1]
    return cols[0], None


def _null(args) -> NullSpec:
    lam = _pair(args.lambda_range, "--lambda-range") if args.lambda_range else None
    if args.null_interval is not None:
        lo, hi = _pair(args.null_interval, "--null-interval")
        return NullSpec(lo, hi, lam)
    if args.mu0 is None:
        raise InputError("give --mu0 or --null-interval")
    return NullSpec.point(args.mu0, lam)


# --------------------------------------------------------------- output

def _num(value) -> str:
    value = float(value)
    if math.isnan(value):
        return '"nan"'
    if math.isinf(value):
        return '"inf"' if value > 0 else '"-inf"'
    return format(value, ".17g")


def to_json(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, dict):
        inner = ", ".join(f'"{k}": {to_json(v)}' for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _cell(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _num(value).strip('"')
    return str(value)


def to_table(columns, rows, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(columns))
    lines += [",".join(_cell(v) for v in row) for row in rows]
    return "\n".join(lines)


def test_document(result) -> dict:
    null = result.null
    return {
        "method": result.method,
        "b": result.b_count,
        "seed": result.seed,
        "mu0_or_interval": null.low if null.is_point else [null.low, null.high],
        "lambda_range": list(null.lambda_range) if null.lambda_range else None,
        "p_h0": result.p_h0,
        "p_h1": result.p_h1,
        "expected_loss": dict(zip(("h0", "h1", "indeterminate"),
                                  result.expected_loss)),
        "decision": result.decision.value,
    }


# ------------------------------------------------------------- commands

def cmd_fit_path(args) -> str:
    cols = ingest_columns(args.data)
    if args.weighted:
        if len(cols) < 2:
            raise InputError("--weighted needs a second column of weights")
        w = cols[1]
        if np.any(w < 0) or w.sum() <= 0:
            raise InputError("weights must be nonnegative with a positive sum")
        sample = WeightedSample(cols[0], w / w.sum())
    else:
        sample = WeightedSample.uniform(cols[0])
    if args.sigma is not None:
        path = scale_path(fit_path(sample), args.sigma)
    else:
        path = fit_scaled_path(sample, args.scale)
    if args.format == "table":
        return to_table(("lambda", "center"), path.knots,
                        comments=[f"sigma={_num(path.sigma)}"])
    return to_json({"sigma": path.sigma,
                    "knots": [{"lambda": lam, "center": c} for lam, c in path.knots]})


def cmd_test(args) -> str:
    x, y = _samples(args)
    null = _null(args)
    loss = LossMatrix(*args.loss) if args.loss else LossMatrix()
    opts = dict(b_count=args.b, seed=args.seed, loss=loss,
                threads=args.threads, scale=args.scale)
    if args.paired:
        result = paired_test(x, y, null, **opts)
    elif args.two_sample:
        result = independent_test(x, y, null, **opts)
    else:
        result = one_sample_test(x, null, **opts)
    doc = test_document(result)
    if args.format == "table":
        flat = {k: v for k, v in doc.items() if k not in ("expected_loss",
                                                         "mu0_or_interval",
                                                         "lambda_range")}
        flat["null_low"], flat["null_high"] = null.low, null.high
        lam = null.lambda_range or (None, None)
        flat["lambda_low"], flat["lambda_high"] = lam
        for k, v in doc["expected_loss"].items():
            flat[f"expected_loss_{k}"] = v
        return to_table(list(flat), [list(flat.values())])
    return to_json(doc)


def cmd_boxplot(args) -> str:
    x, y = _samples(args)
    if args.two_sample:
        family = difference_family(x, y, args.b, args.seed, args.threads, args.scale)
    else:
        data = x - y if args.paired else x
        family = bootstrap_family(data, args.b, args.seed, args.threads, args.scale)
    proportions = (tuple(float(p) for p in args.proportions.split(","))
                   if args.proportions else bands.DEFAULT_PROPORTIONS)
    env = bands.summarize_family(family, args.grid, proportions)
    meta = {"g": args.grid, "proportions": list(env.proportions),
            "lambda_max_rule": bands.LAMBDA_MAX_RULE, "b": family.b_count,
            "seed": family.seed, "median_index": env.median_index}
    if args.format == "table":
        return to_table(env.columns(), env.rows(),
                        comments=[f"{k}={to_json(v)}" for k, v in meta.items()])
    return to_json({"metadata": meta, "columns": env.columns(), "rows": env.rows()})


def cmd_simulate(args) -> str:
    grid = tuple(float(v) for v in args.mu0_grid.split(","))
    scenario = Scenario(
        dist_x=DistSpec.parse(args.dist),
        dist_y=DistSpec.parse(args.dist2) if args.dist2 else None,
        mu0_grid=grid, n=args.n, n2=args.n2, reps=args.reps, b_count=args.b,
        seed=args.seed, threads=args.threads,
        tests=tuple(t.strip() for t in args.tests.split(",")))
    table = rejection_curve(scenario)
    rows = [[r.mu0, r.test, r.rejection_frequency, r.reps, r.mc_stderr]
            for r in table.rows]
    if args.format == "table":
        return to_table(table.COLUMNS, rows)
    return to_json({
        "design": "two-sample" if scenario.two_sample else "one-sample",
        "dist": str(scenario.dist_x),
        "dist2": str(scenario.dist_y) if scenario.dist_y else None,
        "n": scenario.sizes[0], "n2": scenario.sizes[1] if scenario.two_sample else None,
        "b": scenario.b_count, "seed": scenario.seed,
        "rows": [dict(zip(table.COLUMNS, row)) for row in rows]})


def cmd_baseline(args) -> str:
    x, y = _samples(args)
    mu0 = args.mu0 if args.mu0 is not None else 0.0
    if args.two_sample:
        results = [baselines.welch_t(x, y, mu0), baselines.mood_median_test(x, y, mu0)]
    else:
        data = x - y if args.paired else x
        results = [baselines.one_sample_t(data, mu0), baselines.sign_test(data, mu0)]
    rows = [[r.method.value, r.statistic, r.p_value, r.df] for r in results]
    cols = ("method", "statistic", "p_value", "df")
    if args.format == "table":
        return to_table(cols, rows)
    return to_json({"mu0": mu0, "results": [dict(zip(cols, row)) for row in rows]})


# --------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "table"), default="json")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", required=True, help="delimited numeric file")
    data.add_argument("--data2", help="second sample (one column)")
    mode = data.add_mutually_exclusive_group()
    mode.add_argument("--paired", action="store_true")
    mode.add_argument("--two-sample", action="store_true")

    boot = argparse.ArgumentParser(add_help=False)
    boot.add_argument("--b", type=int, default=DEFAULT_B, help="bootstrap replicates")
    boot.add_argument("--seed", type=int, default=DEFAULT_SEED)
    boot.add_argument("--threads", type=int, default=1)
    boot.add_argument("--scale", choices=("mad", "sd"), default="mad",
                      help="scale standardizing the lambda axis")

    parser = argparse.ArgumentParser(
        prog="huberfamily",
        description="Huber solution paths and familial hypothesis tests.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-path", parents=[fmt], help="fit one Huber path")
    p.add_argument("--data", required=True)
    p.add_argument("--weighted", action="store_true",
                   help="second column holds observation weights")
    p.add_argument("--sigma", type=float,
                   help="fixed scale instead of the sample MAD (1 = raw lambda)")
    p.add_argument("--scale", choices=("mad", "sd"), default="mad")
    p.set_defaults(func=cmd_fit_path)

    p = sub.add_parser("test", parents=[fmt, data, boot], help="familial test")
    p.add_argument("--mu0", type=float)
    p.add_argument("--null-interval", help="closed null interval 'low,high'; "
                   "use -inf/inf for one-sided nulls")
    p.add_argument("--lambda-range", help="restrict lambda to 'a,b'")
    p.add_argument("--loss", type=float, nargs=6,
                   metavar=("H0|H0", "H0|H1", "H1|H0", "H1|H1", "I|H0", "I|H1"))
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("boxplot", parents=[fmt, data, boot],
                       help="central envelopes of the posterior family")
    p.add_argument("--grid", type=int, default=bands.DEFAULT_GRID)
    p.add_argument("--proportions", help="comma-separated central proportions")
    p.set_defaults(func=cmd_boxplot)

    p = sub.add_parser("simulate", parents=[fmt], help="rejection-frequency curves")
    p.add_argument("--dist", required=True, help="e.g. exponential:1, normal:0,1")
    p.add_argument("--dist2", help="second distribution (two-sample design)")
    p.add_argument("--mu0-grid", required=True, help="comma-separated null values")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--n2", type=int)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--b", type=int, default=500)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--tests", default="familial,t",
                   help="subset of familial,t,sign (one-sample) or familial,t,mood")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("baseline", parents=[fmt, data],
                       help="t and sign (or Welch and Mood) tests")
    p.add_argument("--mu0", type=float)
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateDataError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    sys.stdout.write(out + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
