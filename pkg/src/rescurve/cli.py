"""Command-line front end.

Subcommands: build, eval, fit, aggregate, sample, deplete, export.
Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 numeric
error (depletion, out-of-domain query, non-convergence).  With --json,
errors are emitted as a JSON object on stderr.

All randomness is seeded (--seed, default 0) so identical invocations
produce byte-identical outputs.  The RESCURVE_DATA environment variable
supplies the default data directory for build.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import curveset, ledger
from .atlas import RegionSet, reaggregate
from .curveset import sample as sample_curve
from .distcore import DistributionKind
from .errors import DepletionError, DomainError, ParseError, RescurveError
from .fitter import FitPoint, augment, fit
from .ingest import GLOBAL, Database, build_all

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of calling sys.exit."""

    def error(self, message):
        raise _UsageError(message)


def _atomic_write_text(path, text):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _load_db(path) -> Database:
    if not os.path.exists(path):
        raise ParseError(f"database file not found: {path}")
    return Database.load(path)


def _tabulated(db, resource, region, bound, n):
    env = db.envelope(resource, region)
    curve = env.curve(bound)
    if not curve.components:
        raise DomainError(
            f"{resource}/{region}/{bound} is an empty curve (zero potential)"
        )
    return curveset.tabulate(curve, n=n)


def _add_db_args(p):
    p.add_argument("--db", required=True, help="database JSON produced by build")
    p.add_argument("--resource", required=True)
    p.add_argument("--region", default=GLOBAL)
    p.add_argument("--bound", default="mode", choices=["lower", "mode", "upper"])
    p.add_argument("--grid", type=int, default=curveset.DEFAULT_GRID_POINTS)


def build_parser() -> _Parser:
    parser = _Parser(prog="rescurve", description=__doc__)
    parser.add_argument("--json", action="store_true",
                        help="machine-readable errors on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build the envelope database from data tables")
    p.add_argument("--data", default=None,
                   help="data directory (default: RESCURVE_DATA or packaged tables)")
    p.add_argument("--out", required=True, help="output database JSON path")
    p.add_argument("--config", default=None, help="unit-constant overrides (key=value)")

    p = sub.add_parser("eval", help="query cost or quantity on one curve")
    _add_db_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--at-quantity", type=float,
                   help="cumulative quantity; prints the marginal cost there")
    g.add_argument("--at-cost", type=float,
                   help="cost level; prints the economic potential below it")

    p = sub.add_parser("fit", help="fit a distribution to cumulative data points")
    p.add_argument("--kind", required=True,
                   choices=[k.value for k in DistributionKind])
    p.add_argument("--points", required=True,
                   help="CSV with columns C,N (cost, cumulative quantity)")
    p.add_argument("--augment", action="store_true",
                   help="add the zero and saturation anchors before fitting")
    p.add_argument("--relative", action="store_true",
                   help="weight residuals by datum size")

    p = sub.add_parser("aggregate", help="regroup regional curves into new regions")
    _add_db_args(p)
    p.add_argument("--regions", required=True,
                   help="CSV (region,country) grouping shipped region names")

    p = sub.add_parser("sample", help="draw curves from an uncertainty envelope")
    _add_db_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None,
                   help="directory for sampled curve CSVs (totals print either way)")

    p = sub.add_parser("deplete", help="run a consumption trajectory over a curve")
    _add_db_args(p)
    p.add_argument("--traj", required=True, help="CSV with a dQ column per step")

    p = sub.add_parser("export", help="write tabulated curve CSVs for plotting")
    p.add_argument("--db", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--grid", type=int, default=curveset.DEFAULT_GRID_POINTS)

    return parser


def _cmd_build(args):
    data_dir = args.data or os.environ.get("RESCURVE_DATA")
    db = build_all(data_dir, config=args.config)
    db.save(args.out)
    totals = db.report.get("totals_EJ_or_PJ_per_y", {})
    for res in sorted(totals):
        t = totals[res]
        print(f"{res}: L={t['lower']:.6g} M={t['mode']:.6g} U={t['upper']:.6g}")
    print(f"database written to {args.out}")
    return EXIT_OK


def _cmd_eval(args):
    db = _load_db(args.db)
    if args.at_cost is not None:
        env = db.envelope(args.resource, args.region)
        value = env.curve(args.bound).cumulative(args.at_cost)
    else:
        tab = _tabulated(db, args.resource, args.region, args.bound, args.grid)
        value = curveset.invert(tab, args.at_quantity)
    print(f"{value:.6f}")
    return EXIT_OK


def _read_points(path) -> list[FitPoint]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames[:2]] != [
            "C", "N",
        ]:
            raise ParseError(f"{path}: expected header 'C,N'")
        try:
            return [FitPoint(float(r["C"]), float(r["N"])) for r in reader]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}") from exc


def _cmd_fit(args):
    points = _read_points(args.points)
    if args.augment:
        points = augment(points)
    result = fit(DistributionKind(args.kind), points, relative=args.relative)
    print(json.dumps(
        {
            "kind": result.dist.kind.value,
            "A": result.dist.A,
            "B": result.dist.B,
            "C0": result.dist.C0,
            "rmse": result.rmse,
            "per_point_residuals": result.per_point_residuals,
            "converged": result.converged,
            "iterations": result.iterations,
        },
        indent=2, sort_keys=True,
    ))
    return EXIT_OK if result.converged else EXIT_NUMERIC


def _cmd_aggregate(args):
    db = _load_db(args.db)
    envs = db.resources.get(args.resource)
    if envs is None:
        raise ParseError(f"no such resource: {args.resource}")
    regions = RegionSet.from_csv(args.regions)
    curves = {
        region: env.curve(args.bound)
        for region, env in envs.items()
        if region != GLOBAL
    }
    grouped = reaggregate(curves, regions)
    out = {name: curve.potential for name, curve in grouped.items()}
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_sample(args):
    db = _load_db(args.db)
    env = db.envelope(args.resource, args.region)
    rng = np.random.default_rng(args.seed)
    draws = rng.uniform(size=args.n)
    totals = curveset.total_quantile(env, draws)
    for u, total in zip(draws, totals):
        print(f"{total:.6f}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for i, u in enumerate(draws):
            curve = sample_curve(env, float(u))
            if not curve.components:
                continue
            tab = curveset.tabulate(curve, n=args.grid)
            dest = os.path.join(args.out, f"{args.resource}_sample_{i:05d}.csv")
            tmp = f"{dest}.tmp.{os.getpid()}"
            tab.to_csv(tmp)
            os.replace(tmp, dest)
    return EXIT_OK


def _cmd_deplete(args):
    db = _load_db(args.db)
    tab = _tabulated(db, args.resource, args.region, args.bound, args.grid)
    with open(args.traj, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "dQ" not in reader.fieldnames:
            raise ParseError(f"{args.traj}: expected a dQ column")
        try:
            steps = [float(r["dQ"]) for r in reader]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{args.traj}: {exc}") from exc
    state = ledger.LedgerState(args.resource, tab)
    writer = csv.writer(sys.stdout)
    writer.writerow(["step", "Q", "marginal_cost", "average_cost"])
    for i, dq in enumerate(steps):
        state, avg = ledger.consume(state, dq)
        writer.writerow(
            [i, f"{state.Q:.6f}", f"{ledger.marginal_cost(state):.6f}", f"{avg:.6f}"]
        )
    return EXIT_OK


def _cmd_export(args):
    db = _load_db(args.db)
    os.makedirs(args.out, exist_ok=True)
    written = 0
    for resource, envs in sorted(db.resources.items()):
        for region, env in sorted(envs.items()):
            for bound in ("lower", "mode", "upper"):
                curve = env.curve(bound)
                if not curve.components:
                    continue
                tab = curveset.tabulate(curve, n=args.grid)
                safe_region = region.replace(" ", "_").replace("/", "_")
                dest = os.path.join(
                    args.out, f"{resource}__{safe_region}__{bound}.csv"
                )
                tmp = f"{dest}.tmp.{os.getpid()}"
                tab.to_csv(tmp)
                os.replace(tmp, dest)
                written += 1
    print(f"wrote {written} curve files to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "build": _cmd_build,
    "eval": _cmd_eval,
    "fit": _cmd_fit,
    "aggregate": _cmd_aggregate,
    "sample": _cmd_sample,
    "deplete": _cmd_deplete,
    "export": _cmd_export,
}


def _emit_error(kind, message, as_json):
    if as_json:
        print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    else:
        print(f"rescurve: {kind}: {message}", file=sys.stderr)


def run(argv=None) -> int:
    parser = build_parser()
    as_json = False
    try:
        args = parser.parse_args(argv)
        as_json = args.json
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        _emit_error("usage", str(exc), as_json)
        return EXIT_USAGE
    except (DepletionError, DomainError) as exc:
        _emit_error("numeric", str(exc), as_json)
        return EXIT_NUMERIC
    except RescurveError as exc:
        _emit_error("data", str(exc), as_json)
        return EXIT_DATA
    except OSError as exc:
        _emit_error("data", str(exc), as_json)
        return EXIT_DATA


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
