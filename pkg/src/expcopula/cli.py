"""Command-line interface.

Every subcommand writes one JSON report to stdout (``sample`` and ``grid``
write CSV instead). Exit codes: 0 success, 2 invalid input or infeasible
parameters, 3 I/O failure, 4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Sequence

import numpy as np

from . import __version__
from . import brd, copula as cop, dependence as dep, inference as inf
from ._exceptions import ConvergenceError, DataError, DomainError, ToleranceError
from .io import CsvSchema, RunReport, emit_report, ingest_csv, write_csv
from .quadrature import QuadratureSpec

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_NONCONVERGENCE = 4


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, required=True, help="shape parameter")
    p.add_argument("--delta", type=float, required=True, help="dependence parameter")


def _add_csv(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="CSV file with paired observations")
    p.add_argument("--delimiter", default=",")
    header = p.add_mutually_exclusive_group()
    header.add_argument("--header", dest="has_header", action="store_const", const=True, default=None)
    header.add_argument("--no-header", dest="has_header", action="store_const", const=False)
    p.add_argument("--x-column", type=int, default=0)
    p.add_argument("--y-column", type=int, default=1)
    p.add_argument("--lenient", action="store_true", help="skip bad rows instead of aborting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="expcopula", description=__doc__.splitlines()[0])
    parser.add_argument("--pretty", action="store_true", help="indented JSON, 4-decimal numbers")
    parser.add_argument("--timing", action="store_true", help="include wall time in the report")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    # repeated on each subcommand; SUPPRESS keeps a top-level flag from being reset
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)
    add = sub.add_parser

    def sub_add_parser(name, **kwargs):
        return add(name, parents=[common], **kwargs)

    sub.add_parser = sub_add_parser

    p = sub.add_parser("validate", help="check feasibility of (alpha, delta)")
    _add_params(p)

    p = sub.add_parser("eval", help="copula CDF, density and conditional CDFs at (u, v)")
    _add_params(p)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--v", type=float, required=True)

    p = sub.add_parser("table1", help="upper dependence range for a list of alpha values")
    p.add_argument("--alpha-list", type=float, nargs="+", default=list(dep.TABLE1_ALPHAS))
    p.add_argument("--with-ranges", action="store_true", help="append the FGM-family range comparison")

    p = sub.add_parser("measures", help="dependence measures for (alpha, delta)")
    _add_params(p)
    p.add_argument("--oracle", action="store_true", help="also evaluate by quadrature")
    p.add_argument("--nodes", type=int, default=128)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("properties", help="quadrant dependence, TP2 and tail probes")
    _add_params(p)
    p.add_argument("--grid", type=int, default=101)

    p = sub.add_parser("sample", help="draw copula or BRD samples as CSV")
    _add_params(p)
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("grid", help="density/CDF values on a regular grid as CSV")
    _add_params(p)
    p.add_argument("--points", type=int, default=51)
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--ymax", type=float)

    p = sub.add_parser("ks", help="Kolmogorov-Smirnov test of one column against a Rayleigh law")
    _add_csv(p)
    p.add_argument("--column", choices=("x", "y"), default="x")
    p.add_argument("--lambda", dest="lam", type=float, help="scale to test (default: MLE)")

    p = sub.add_parser("fit", help="maximum-likelihood fit of the bivariate Rayleigh model")
    _add_csv(p)
    p.add_argument("--restarts", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _copula_params(args) -> cop.CopulaParams:
    return cop.CopulaParams(args.alpha, args.delta)


def _feasibility(alpha: float, delta: float) -> dict:
    bound = None if alpha == 0.0 or abs(alpha) > cop.ALPHA_LIMIT else cop.delta_star(alpha)
    return {"alpha": alpha, "delta": delta, "delta_star": bound, "feasible": cop.is_feasible(alpha, delta)}


def _cmd_validate(args):
    result = _feasibility(args.alpha, args.delta)
    return result, (EXIT_OK if result["feasible"] else EXIT_INVALID)


def _cmd_eval(args):
    p = _copula_params(args)
    u, v = args.u, args.v
    result = {
        "cdf": cop.cdf(p, u, v),
        "pdf": cop.pdf(p, u, v),
        "conditional_cdf_v_given_u": cop.conditional_cdf(p, u, v),
        "conditional_cdf_u_given_v": cop.conditional_cdf(p, v, u),
    }
    return result, EXIT_OK


def _cmd_table1(args):
    rows = [row._asdict() for row in dep.table1(args.alpha_list)]
    result = {"columns": list(dep.Table1Row._fields), "rows": rows}
    if args.with_ranges:
        result["range_comparison"] = dep.range_comparison()
    return result, EXIT_OK


def _cmd_measures(args):
    p = _copula_params(args)
    closed = dep.related_measures(p)
    result = {"closed_form": closed.as_dict()}
    if args.oracle:
        oracle = dep.measure_oracle(p, QuadratureSpec(args.nodes, args.tol))
        result["quadrature"] = oracle.as_dict()
        result["difference"] = dict(zip(("rho", "gamma", "tau", "eta", "phi"), oracle.values() - closed.values()))
    return result, EXIT_OK


def _cmd_properties(args):
    p = _copula_params(args)
    quadrant = dep.check_quadrant_dependence(p, args.grid)
    tp2 = dep.check_tp2(p, args.grid)
    tails = dep.tail_dependence_probe(p)
    result = {
        "quadrant": {**quadrant.__dict__, "consistent": quadrant.consistent},
        "tp2": {**tp2.__dict__, "guaranteed": p.delta >= 0 and p.alpha <= 2},
        "tail": {
            "lower": [[u, q] for u, q in tails.lower.items()],
            "upper": [[u, q] for u, q in tails.upper.items()],
        },
    }
    return result, EXIT_OK


def _cmd_sample(args, out):
    if (args.lambda1 is None) != (args.lambda2 is None):
        raise DomainError("--lambda1 and --lambda2 must be given together")
    if args.lambda1 is None:
        draws = cop.sample(_copula_params(args), args.n, args.seed)
        write_csv(draws, ("u", "v"), out)
    else:
        p = brd.BrdParams(args.lambda1, args.lambda2, args.alpha, args.delta)
        write_csv(brd.sample_brd(p, args.n, args.seed), ("x", "y"), out)


def _cmd_grid(args, out):
    if args.points < 2:
        raise DomainError("--points must be at least 2")
    if args.lambda1 is None and args.lambda2 is None:
        p = _copula_params(args)
        t = np.linspace(0.0, 1.0, args.points)
        U, V = np.meshgrid(t, t, indexing="ij")
        table = np.column_stack([U.ravel(), V.ravel(), cop.cdf(p, U, V).ravel(), cop.pdf(p, U, V).ravel()])
        write_csv(table, ("u", "v", "cdf", "pdf"), out)
        return
    if args.lambda1 is None or args.lambda2 is None:
        raise DomainError("--lambda1 and --lambda2 must be given together")
    p = brd.BrdParams(args.lambda1, args.lambda2, args.alpha, args.delta)
    xmax = args.xmax if args.xmax is not None else 4.0 * p.lambda1
    ymax = args.ymax if args.ymax is not None else 4.0 * p.lambda2
    X, Y = np.meshgrid(np.linspace(0.0, xmax, args.points), np.linspace(0.0, ymax, args.points), indexing="ij")
    table = np.column_stack(
        [X.ravel(), Y.ravel(), brd.joint_cdf(p, X, Y).ravel(), brd.joint_pdf(p, X, Y).ravel()]
    )
    write_csv(table, ("x", "y", "cdf", "pdf"), out)


def _ingest(args):
    schema = CsvSchema(args.delimiter, args.has_header, args.x_column, args.y_column)
    ingested = ingest_csv(args.input, schema, strict=not args.lenient)
    for line in ingested.diagnostics:
        print(f"skipped {line}", file=sys.stderr)
    return ingested


def _cmd_ks(args):
    ingested = _ingest(args)
    values = ingested.data.x if args.column == "x" else ingested.data.y
    report = inf.ks_test_rayleigh(values, args.lam)
    return {**report.as_dict(), "column": args.column, "rows_skipped": ingested.rows_skipped}, EXIT_OK


def _cmd_fit(args):
    ingested = _ingest(args)
    data = ingested.data
    fit = inf.fit_brd(data, restarts=args.restarts, rng_seed=args.seed)
    marginals = {
        "x": inf.ks_test_rayleigh(data.x).as_dict(),
        "y": inf.ks_test_rayleigh(data.y).as_dict(),
    }
    result = {
        "fit": fit.as_dict(),
        "independence_log_lik": inf.independence_log_likelihood(data),
        "marginal_ks": marginals,
        "comparison": inf.model_comparison(data.n, fit),
        "rows_skipped": ingested.rows_skipped,
    }
    return result, EXIT_OK


_JSON_COMMANDS = {
    "validate": _cmd_validate,
    "eval": _cmd_eval,
    "table1": _cmd_table1,
    "measures": _cmd_measures,
    "properties": _cmd_properties,
    "ks": _cmd_ks,
    "fit": _cmd_fit,
}
_CSV_COMMANDS = {"sample": _cmd_sample, "grid": _cmd_grid}
_IGNORED = {"command", "pretty", "timing"}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    start = time.perf_counter()
    try:
        if args.command in _CSV_COMMANDS:
            _CSV_COMMANDS[args.command](args, sys.stdout)
            return EXIT_OK
        results, code = _JSON_COMMANDS[args.command](args)
    except (DomainError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConvergenceError, ToleranceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE

    parameters = {k: v for k, v in sorted(vars(args).items()) if k not in _IGNORED}
    report = RunReport(
        command=args.command,
        parameters=parameters,
        results=results,
        version=__version__,
        seed=getattr(args, "seed", None),
        wall_time=time.perf_counter() - start if args.timing else None,
    )
    sys.stdout.write(emit_report(report, pretty=args.pretty))
    return code


if __name__ == "__main__":
    sys.exit(main())
