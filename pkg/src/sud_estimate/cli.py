"""Command-line interface.

Subcommands:

* ``risk``     exact risk of one scheme at one level
* ``sweep``    risk as a function of N, with an optional rate-constant fit
* ``constant`` closed-form rate constant, optionally with lattice estimates
* ``optimal``  leading eigenpair of the incidence form at one level
* ``verify``   cross-checks of the combinatorial engine against the
               character oracle; fails (exit 1) iff any check exceeds its
               tolerance
* ``cache``    build / revalidate the on-disk partition tables

Reports are JSON by default (stable key order, exact rationals as
"num/den" strings) or CSV via ``--format csv``.  Exit codes: 0 success,
1 failed verification, 2 infeasible parameters (empty support or empty
sum), 3 numerical non-convergence or refused resolution.
"""

from __future__ import annotations

import argparse
import collections.abc
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .asymptotics import exact_constant
from .cache import cache_tables, resolve_cache_dir
from .characters import (
    haar_quadrature,
    min_resolution,
    orthogonality_defect,
    pieri_residual,
    quadrature_risk,
    random_torus_points,
)
from .errors import (
    ConvergenceError,
    EmptySupportError,
    NumericalInstabilityError,
    ResolutionError,
)
from .partitions import enumerate_partitions
from .risk import curve_to_csv, exact_risk, expansion_diagnostics, risk_curve
from .spectral import build_incidence, max_eigenpair, optimality_gap
from .weights import save_weights, scheme_weights, weights_to_json

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3


def _fr(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _parse_range(text: str) -> list[int]:
    """'a:b' inclusive, 'a:b:step', or a single integer."""
    pieces = text.split(":")
    try:
        nums = [int(p) for p in pieces]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from exc
    if len(nums) == 1:
        return nums
    if len(nums) == 2:
        lo, hi = nums
        return list(range(lo, hi + 1))
    if len(nums) == 3:
        lo, hi, step = nums
        return list(range(lo, hi + 1, step))
    raise argparse.ArgumentTypeError(f"bad range {text!r}")


def _config_echo(args: argparse.Namespace) -> dict:
    skip = {"func", "format", "no_timestamp", "command"}
    out = {}
    for key in sorted(vars(args)):
        if key in skip:
            continue
        value = getattr(args, key)
        if callable(value):
            continue
        if isinstance(value, Fraction):
            value = _fr(value)
        if isinstance(value, collections.abc.Sequence) and not isinstance(value, str):
            value = list(value)
        out[key] = value
    return out


def _payload(args: argparse.Namespace, command: str, body: dict) -> dict:
    out = {"version": __version__, "command": command, "config": _config_echo(args)}
    if not args.no_timestamp:
        out["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    out.update(body)
    return out


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _csv_rows(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_risk(args) -> int:
    w = scheme_weights(args.scheme, args.d, args.n, tol=args.tol)
    breakdown = exact_risk(args.d, args.n, w)
    body = {
        "risk": _fr(breakdown.risk),
        "risk_float": float(breakdown.risk),
        "n2_risk": args.n * args.n * float(breakdown.risk),
        "numerator": _fr(breakdown.numerator),
        "norm_sq": _fr(breakdown.norm_sq),
        "support_size": len(w.entries),
    }
    if args.terms:
        body["numerator_terms"] = [
            {"parts": list(parts), "value": _fr(value)}
            for parts, value in breakdown.numerator_terms.items()
        ]
    if args.format == "csv":
        print(
            _csv_rows(
                ["d", "N", "scheme", "risk_num", "risk_den", "risk_float"],
                [[args.d, args.n, args.scheme,
                  breakdown.risk.numerator, breakdown.risk.denominator,
                  repr(float(breakdown.risk))]],
            ),
            end="",
        )
    else:
        _print_json(_payload(args, "risk", body))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    curve = risk_curve(
        args.d,
        args.n,
        args.scheme,
        exact=args.exact,
        fit=args.fit,
        workers=args.workers,
    )
    if not curve.points:
        raise EmptySupportError(
            f"no feasible level in {min(args.n)}..{max(args.n)} for "
            f"scheme {args.scheme!r} at d={args.d}"
        )
    if args.format == "csv":
        print(curve_to_csv(curve), end="")
        return EXIT_OK
    rows = []
    for p in curve.points:
        row = {"N": p.n, "risk_float": p.risk_float, "n2_risk": p.n2_risk}
        if p.risk is not None:
            row["risk"] = _fr(p.risk)
        rows.append(row)
    body = {
        "scheme": curve.scheme,
        "rows": rows,
        "skipped": [{"N": n, "reason": reason} for n, reason in curve.skipped],
    }
    if curve.fit is not None:
        body["fit"] = {
            "constant": curve.fit.constant,
            "slope": curve.fit.slope,
            "window": list(curve.fit.window),
            "max_residual": curve.fit.max_residual,
        }
    _print_json(_payload(args, "sweep", body))
    return EXIT_OK


def _cmd_constant(args) -> int:
    levels = args.riemann or []
    report = exact_constant(args.d, riemann_levels=levels)
    if args.format == "csv":
        rows = [["exact", "", repr(float(report.exact))]]
        rows += [["riemann", n, repr(v)] for n, v in report.riemann_estimates]
        print(_csv_rows(["kind", "N", "value"], rows), end="")
        return EXIT_OK
    body = {
        "d": args.d,
        "exact": _fr(report.exact),
        "float": float(report.exact),
        "numerator_integral": _fr(report.numerator_integral),
        "denominator_integral": _fr(report.denominator_integral),
        "riemann": [{"N": n, "value": v} for n, v in report.riemann_estimates],
    }
    _print_json(_payload(args, "constant", body))
    return EXIT_OK


def _cmd_optimal(args) -> int:
    structure = build_incidence(args.d, args.n, args.support)
    result = max_eigenpair(structure, tol=args.tol, max_iterations=args.max_iterations)
    gap = optimality_gap(args.d, args.n, tol=args.tol)
    if args.export:
        save_weights(result.eigvec, args.export)
    coeffs = weights_to_json(result.eigvec)
    if args.format == "csv":
        rows = [[ " ".join(str(x) for x in rec["parts"]), rec["weight"]] for rec in coeffs]
        print(_csv_rows(["parts", "weight"], rows), end="")
        return EXIT_OK
    body = {
        "support": args.support,
        "eigmax": result.eigmax,
        "optimal_risk": result.optimal_risk,
        "n2_optimal_risk": args.n * args.n * result.optimal_risk,
        "iterations": result.iterations,
        "residual": result.residual,
        "full_optimal_risk": gap.risk_optimal,
        "strict_optimal_risk": gap.risk_optimal_strict,
        "product_risk": _fr(gap.risk_product) if gap.risk_product is not None else None,
        "product_gap": gap.gap,
        "coefficients": coeffs,
    }
    _print_json(_payload(args, "optimal", body))
    return EXIT_OK


def _verify_checks(args) -> list[dict]:
    checks = []

    def record(name: str, error: float, tolerance: float):
        checks.append(
            {
                "name": name,
                "max_error": error,
                "tolerance": tolerance,
                "pass": bool(error <= tolerance),
            }
        )

    rule = haar_quadrature(args.d, min_resolution(args.d, args.n_max))
    ones = rule.eigenvalues[:, 0] * 0 + 1.0
    record("haar-normalization", abs(rule.integrate(ones) - 1.0), 1e-12)

    ortho_level = min(args.n_max, 8)
    record(
        "character-orthogonality",
        orthogonality_defect(args.d, ortho_level),
        1e-8,
    )

    points = random_torus_points(args.d, args.points, seed=args.seed)
    worst = 0.0
    for n in range(min(args.n_max, 6) + 1):
        for parts in enumerate_partitions(args.d, n):
            worst = max(worst, pieri_residual(parts, points))
    record("branching-pointwise", worst, 1e-9)

    worst = 0.0
    compared = 0
    for scheme in ("product", "uniform", "optimal"):
        for n in range(1, args.n_max + 1):
            try:
                w = scheme_weights(scheme, args.d, n, tol=args.tol)
            except EmptySupportError:
                continue
            exact = float(exact_risk(args.d, n, w).risk)
            quad = quadrature_risk(args.d, n, w)
            worst = max(worst, abs(exact - quad))
            compared += 1
    if compared == 0:
        raise EmptySupportError(
            f"no feasible (scheme, N) pair up to N={args.n_max} for d={args.d}"
        )
    record("risk-oracle", worst, 1e-7)

    exact_identities = True
    for n in range(args.d * (args.d + 1) // 2 - 1, args.n_max + 1):
        diag = expansion_diagnostics(args.d, n)
        exact_identities &= diag.c_t == diag.c_u and diag.t1 == diag.u1
    record("expansion-identities", 0.0 if exact_identities else 1.0, 0.0)
    return checks


def _cmd_verify(args) -> int:
    checks = _verify_checks(args)
    ok = all(c["pass"] for c in checks)
    if args.format == "csv":
        rows = [
            [c["name"], repr(c["max_error"]), repr(c["tolerance"]), c["pass"]]
            for c in checks
        ]
        print(_csv_rows(["check", "max_error", "tolerance", "pass"], rows), end="")
    else:
        _print_json(_payload(args, "verify", {"checks": checks, "pass": ok}))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _cmd_cache(args) -> int:
    directory = resolve_cache_dir(args.cache_dir)
    report = cache_tables(args.d, args.n_max, directory)
    if args.format == "csv":
        rows = [
            [e["d"], e["level"], e["path"], e["sha256"]]
            for e in report.manifest["entries"]
        ]
        print(_csv_rows(["d", "level", "path", "sha256"], rows), end="")
        return EXIT_OK
    body = {
        "directory": str(report.directory),
        "reused_levels": list(report.reused),
        "rebuilt_levels": list(report.rebuilt),
        "warnings": list(report.warnings),
        "manifest": report.manifest,
    }
    _print_json(_payload(args, "cache", body))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sud-estimate",
        description="Risk and rate analysis of coefficient schemes for SU(d) estimation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the generated_at field for byte-identical reports")
    common.add_argument("--tol", type=float, default=1e-12,
                        help="relative residual tolerance for iterative solvers")
    common.add_argument("--workers", type=int, default=1,
                        help="process count for sweeps; results are identical at any setting")
    common.add_argument("--cache-dir", default=None,
                        help=f"partition table directory (else ${'{'}SUD_ESTIMATE_CACHE{'}'})")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("risk", parents=[common], help="exact risk of one scheme")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-N", dest="n", type=int, required=True)
    p.add_argument("--scheme", default="product",
                   help="product | uniform | power:<alpha> | optimal[:support] | file:<path>")
    p.add_argument("--terms", action="store_true", help="include per-partition numerator terms")
    p.set_defaults(func=_cmd_risk)

    p = sub.add_parser("sweep", parents=[common], help="risk as a function of N")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-N", dest="n", type=_parse_range, required=True,
                   metavar="A:B[:STEP]", help="inclusive level range")
    p.add_argument("--scheme", default="product")
    p.add_argument("--fit", action=argparse.BooleanOptionalAction, default=True,
                   help="fit N^2 risk = C + b/N on the largest tested half")
    p.add_argument("--exact", action=argparse.BooleanOptionalAction, default=False,
                   help="exact rational risks instead of the float fast path")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("constant", parents=[common], help="closed-form rate constant")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--riemann", type=_parse_range, default=None, metavar="A:B[:STEP]",
                   help="also evaluate lattice-sum estimates at these levels")
    p.set_defaults(func=_cmd_constant)

    p = sub.add_parser("optimal", parents=[common], help="leading eigenpair of the incidence form")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-N", dest="n", type=int, required=True)
    p.add_argument("--support", choices=("full", "strict"), default="full")
    p.add_argument("--max-iterations", type=int, default=10**6,
                   help="power iteration cap before giving up")
    p.add_argument("--export", default=None, metavar="PATH",
                   help="write the optimal coefficients as a weights JSON file")
    p.set_defaults(func=_cmd_optimal)

    p = sub.add_parser("verify", parents=[common],
                       help="cross-check combinatorics against the character oracle")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--seed", type=int, default=20240801)
    p.add_argument("--points", type=int, default=100,
                   help="random torus points for the pointwise branching check")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("cache", parents=[common], help="build/revalidate partition tables")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=_cmd_cache)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        # EmptySupportError / EmptySumError and bad scheme or parameter
        # strings all mean the request itself cannot be satisfied
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConvergenceError, ResolutionError, NumericalInstabilityError) as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return EXIT_NUMERICAL


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
