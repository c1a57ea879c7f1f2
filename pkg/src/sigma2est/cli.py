"""
Command line front end.

Exit codes: 0 success, 2 problem/surface outside the well-posed class,
3 solver disagreement, 64 usage or malformed JSON, 65 invalid input data,
66 input file missing.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import checks, estimate, geomkit, minval
from ._io import dumps, fmt_float

EX_OK = 0
EX_CLASS = 2
EX_DISAGREE = 3
EX_USAGE = 64
EX_DATAERR = 65
EX_NOINPUT = 66

AGREE_VALUE_TOL = 1e-9
AGREE_X_TOL = 1e-8


class CliExit(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--input", metavar="PATH")
    p.add_argument("--output", metavar="PATH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default=None)


def build_parser():
    parser = _Parser(prog="sigma2est", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, helptext in (
        ("minsolve", "solve one MinProblem JSON with all solvers"),
        ("verify", "seeded three-way solver cross-check"),
        ("symcheck", "symmetric-function and estimate identity suites"),
        ("surface", "curvature report for an ellipsoid or radial grid"),
        ("explore", "numerical sigma_k analogue of the pointwise problem"),
    ):
        _common(sub.add_parser(name, help=helptext))
    return parser


def _read_json(path):
    if path is None:
        raise CliExit(EX_USAGE, "--input is required")
    try:
        with open(path) as fh:
            text = fh.read()
    except FileNotFoundError:
        raise CliExit(EX_NOINPUT, f"input file not found: {path}")
    except OSError as exc:
        raise CliExit(EX_NOINPUT, f"cannot read {path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliExit(EX_USAGE, f"malformed JSON in {path}: {exc}")


def _emit(text, path, out):
    if not text.endswith("\n"):
        text += "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def run_minsolve(args, out):
    data = _read_json(args.input)
    try:
        prob = minval.MinProblem.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliExit(EX_DATAERR, f"invalid MinProblem: {exc}")
    wp = minval.check_conditions(prob)
    if wp.kind is not minval.ProblemClass.WELL_POSED:
        _emit(dumps(wp.to_dict()), args.output, out)
        return EX_CLASS
    cmp = minval.compare_solvers(prob)
    sol = cmp["solutions"][0]
    rec = sol.to_dict()
    if cmp["value"] > AGREE_VALUE_TOL or cmp["x"] > AGREE_X_TOL:
        rec["disagreement"] = {"value": cmp["value"], "x": cmp["x"]}
        _emit(dumps(rec), args.output, out)
        return EX_DISAGREE
    _emit(dumps(rec), args.output, out)
    return EX_OK


def run_verify(args, out):
    trials = 1000 if args.trials is None else args.trials
    if trials < 1:
        raise CliExit(EX_USAGE, "--trials must be >= 1")
    n_range = (2, 12) if args.n is None else (args.n, args.n)
    if n_range[0] < 2:
        raise CliExit(EX_USAGE, "--n must be >= 2")
    rep = minval.fuzz_compare(args.seed, trials, n_range=n_range)
    summary = rep.to_dict()
    summary["ok"] = rep.ok(AGREE_VALUE_TOL)
    _emit(dumps(summary, indent=2), args.output, out)
    return EX_OK if summary["ok"] else EX_DISAGREE


def run_symcheck(args, out):
    trials = 1000 if args.trials is None else args.trials
    if trials < 1:
        raise CliExit(EX_USAGE, "--trials must be >= 1")
    fixture = None
    if args.input:
        fixture = _read_json(args.input)
        if not isinstance(fixture, dict) or "lambda" not in fixture:
            raise CliExit(EX_DATAERR, "fixture must be an object with a 'lambda' list")
    try:
        res = checks.symcheck(args.seed, trials, fixture)
    except ValueError as exc:
        raise CliExit(EX_DATAERR, str(exc))
    _emit(dumps(res, indent=2), args.output, out)
    return EX_OK if res["ok"] else EX_DISAGREE


def run_surface(args, out, err):
    data = _read_json(args.input)
    try:
        spec = geomkit.spec_from_dict(data)
        samples = geomkit.sample_surface(spec, int(data.get("n_theta", 32)), int(data.get("n_phi", 64)))
    except (KeyError, TypeError, ValueError) as exc:
        raise CliExit(EX_DATAERR, f"invalid surface spec: {exc}")
    report = geomkit.aggregate(samples)
    phi = None
    if report.two_convex:
        phi, _ = geomkit.inverse_phi(samples, args.alpha)
    rec = report.to_dict()
    rec["alpha"] = args.alpha
    table = geomkit.samples_csv(samples, phi)
    if args.format == "csv":
        out.write(table)
        err.write(dumps(rec) + "\n")
    else:
        out.write(dumps(rec, indent=2) + "\n")
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(table)
    return EX_OK if report.two_convex else EX_CLASS


def _explore_fixtures(data):
    items = data if isinstance(data, list) else [data]
    for it in items:
        yield np.asarray(it["lambda"], dtype=float), float(it.get("b", 0.0)), float(it.get("C", 0.0))


def run_explore(args, out):
    n = 4 if args.n is None else args.n
    k = 3 if args.k is None else args.k
    trials = 10 if args.trials is None else args.trials
    if k > n or k < 2 or n < 3:
        raise CliExit(EX_USAGE, f"need 2 <= k <= n and n >= 3, got n={n}, k={k}")
    if trials < 1:
        raise CliExit(EX_USAGE, "--trials must be >= 1")
    try:
        if args.input:
            recs = [estimate.explore_k(lam, k, b, c) for lam, b, c in _explore_fixtures(_read_json(args.input))]
        else:
            recs = estimate.explore_sweep(n, k, trials, args.seed)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliExit(EX_DATAERR, str(exc))
    if args.format == "json":
        text = dumps([dict(zip(r.csv_header(), r.csv_row())) for r in recs], indent=2)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(recs[0].csv_header())
        for r in recs:
            w.writerow([fmt_float(v) if isinstance(v, float) else v for v in r.csv_row()])
        text = buf.getvalue()
    _emit(text, args.output, out)
    return EX_OK


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "minsolve":
            return run_minsolve(args, out)
        if args.subcommand == "verify":
            return run_verify(args, out)
        if args.subcommand == "symcheck":
            return run_symcheck(args, out)
        if args.subcommand == "surface":
            return run_surface(args, out, err)
        return run_explore(args, out)
    except CliExit as exc:
        err.write(f"sigma2est {args.subcommand}: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
