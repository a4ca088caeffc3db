"""Command-line entry point.

Subcommands
-----------
``fcvt test``      test a CSV dataset for heteroscedasticity
``fcvt simulate``  empirical size or power of the test
``fcvt validate``  closed-form moments against exhaustive enumeration

Exit codes: 0 success, 1 validation failure, 2 usage or parse error,
3 numerically degenerate input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .design import MAX_N, design_matrix, general_functionals, projection_matrix
from .errors import FCVTError, InputError, NumericalError, TooLarge
from .hetero import run_test
from .moments import TWO_POINT, cumulants_from_moments, general_moments
from .oracle import MAX_ENUM_N, enumerate_two_point
from .simulation import DESIGN_LAWS, MODELS, SIM_ERROR_LAWS, SimulationConfig, empirical_rate, gen_design

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
EXACT_RTOL = 1e-8
MISSING = {"", "na", "nan", "null", "none", "?"}


@dataclass
class Dataset:
    header: list
    rows: np.ndarray
    response_column: int

    @property
    def response(self) -> np.ndarray:
        return self.rows[:, self.response_column]

    @property
    def covariate_names(self) -> list:
        return [h for j, h in enumerate(self.header) if j != self.response_column]

    @property
    def covariates(self) -> np.ndarray:
        return np.delete(self.rows, self.response_column, axis=1)


def _resolve_column(header, response):
    if response in header:
        return header.index(response)
    try:
        idx = int(response)
    except ValueError:
        raise InputError(f"response column {response!r} not found in header") from None
    if not -len(header) <= idx < len(header):
        raise InputError(f"response index {idx} out of range for {len(header)} columns")
    return idx % len(header)


def read_dataset(path, response) -> Dataset:
    """Read a headed numeric CSV (LF or CRLF line endings)."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} cells, got {len(rec)}")
            vals = []
            for name, cell in zip(header, rec):
                cell = cell.strip()
                if cell.lower() in MISSING:
                    raise InputError(f"{path}:{lineno}: missing value in column {name!r}")
                try:
                    v = float(cell)
                except ValueError:
                    raise InputError(f"{path}:{lineno}: non-numeric value {cell!r} in column {name!r}") from None
                if not math.isfinite(v):
                    raise InputError(f"{path}:{lineno}: non-finite value in column {name!r}")
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return Dataset(header, np.array(rows), _resolve_column(header, str(response)))


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _print_mapping(d, out):
    width = max(len(k) for k in d)
    for k, v in d.items():
        if isinstance(v, dict):
            v = ", ".join(f"{kk}={_fmt(vv)}" for kk, vv in v.items())
        elif isinstance(v, (list, tuple)):
            v = "[" + ", ".join(_fmt(x) for x in v) + "]"
        else:
            v = _fmt(v)
        print(f"{k:<{width}}  {v}", file=out)


def _emit(d, fmt, out):
    if fmt == "json":
        json.dump(d, out, indent=2)
        out.write("\n")
    else:
        _print_mapping(d, out)


def cmd_test(args, out=sys.stdout) -> int:
    ds = read_dataset(args.data, args.response)
    X = ds.covariates
    names = ds.covariate_names
    if args.intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
        names = ["(intercept)"] + names
    if X.shape[0] > MAX_N:
        raise InputError(f"n={X.shape[0]} exceeds the supported maximum of {MAX_N} observations")
    profile = cumulants_from_moments(*args.moments, name="gaussian" if args.moments == [3.0, 15.0, 105.0] else "custom")
    dm = design_matrix(X, names=names)
    report = run_test(dm, ds.response, profile, two_sided=args.two_sided)
    _emit(report.to_dict(args.alpha), args.format, out)
    return EXIT_OK


def cmd_simulate(args, out=sys.stdout) -> int:
    config = SimulationConfig(
        n=args.n, p=args.p, design_law=args.design, error_law=args.error, model=args.model,
        reps=args.reps, alpha=args.alpha, seed=args.seed, fixed_design=args.fixed_design,
    )
    result = empirical_rate(config)
    _emit(result.to_dict(config), args.format, out)
    return EXIT_OK


def validation_table(n: int, p: int, seed: int, sigma: str) -> list:
    """Closed-form moments against two-point enumeration on a random design."""
    if n > min(12, MAX_ENUM_N):
        raise TooLarge(f"TooLarge: validate needs n <= 12, got n={n}")
    dm = gen_design("normal", n, p, seed)
    pm = projection_matrix(dm)
    if sigma == "const":
        sig = np.ones(n)
    else:
        sig = np.where(np.arange(n) < n // 2, 1.0, 2.0)
    closed = general_moments(general_functionals(pm, sig), TWO_POINT)
    exact = enumerate_two_point(pm.P * sig)
    rows = []
    for q, c, o in (("ET1", closed.ET1, exact.ET1), ("ET2", closed.ET2, exact.ET2),
                    ("VarT1", closed.VarT1, exact.VarT1)):
        c, o = float(c), float(o)
        rel = abs(c - o) / max(abs(o), 1e-300)
        rows.append({"quantity": q, "mode": "exact", "closed_form": c, "oracle": o,
                     "rel_error": rel, "pass": bool(rel <= EXACT_RTOL)})
    for q, c, o in (("VarT2", closed.VarT2_leading, exact.VarT2), ("Cov", closed.Cov_leading, exact.Cov)):
        c, o = float(c), float(o)
        rows.append({"quantity": q, "mode": "ratio", "closed_form": c, "oracle": o,
                     "rel_error": abs(c - o) / max(abs(o), 1e-300), "ratio": o / c, "pass": None})
    return rows


def cmd_validate(args, out=sys.stdout) -> int:
    rows = validation_table(args.n, args.p, args.seed, args.sigma)
    ok = all(r["pass"] for r in rows if r["mode"] == "exact")
    if args.format == "json":
        _emit({"n": args.n, "p": args.p, "seed": args.seed, "sigma": args.sigma,
               "rows": rows, "passed": ok}, "json", out)
    else:
        print(f"{'quantity':<8} {'mode':<6} {'closed_form':>14} {'oracle':>14} {'rel_error':>11}  pass", file=out)
        for r in rows:
            status = {True: "PASS", False: "FAIL", None: f"ratio={r.get('ratio', 0):.4g}"}[r["pass"]]
            print(f"{r['quantity']:<8} {r['mode']:<6} {r['closed_form']:>14.8g} {r['oracle']:>14.8g} "
                  f"{r['rel_error']:>11.3g}  {status}", file=out)
    return EXIT_OK if ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcvt", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test a CSV dataset")
    t.add_argument("--data", required=True, help="CSV file with a header row")
    t.add_argument("--response", required=True, help="response column name or 0-based index")
    g = t.add_mutually_exclusive_group()
    g.add_argument("--intercept", dest="intercept", action="store_true", default=True,
                   help="add an intercept column (default)")
    g.add_argument("--no-intercept", dest="intercept", action="store_false")
    t.add_argument("--moments", nargs=3, type=float, metavar=("M4", "M6", "M8"),
                   default=[3.0, 15.0, 105.0], help="error moments (default: Gaussian)")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--format", choices=("text", "json"), default="text")
    t.add_argument("--two-sided", action="store_true")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="empirical size or power")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--design", choices=sorted(DESIGN_LAWS), default="normal")
    s.add_argument("--error", choices=SIM_ERROR_LAWS, default="normal")
    s.add_argument("--model", choices=MODELS, default="null")
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--fixed-design", action="store_true")
    s.add_argument("--format", choices=("text", "json"), default="json")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("validate", help="check closed forms against enumeration")
    v.add_argument("--n", type=int, default=8)
    v.add_argument("--p", type=int, default=2)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--sigma", choices=("const", "half2"), default="const")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[list] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FCVTError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
