"""Command-line front end.

Subcommands: bounds, tables, werner, measure, gamma, examples.  Each run
builds a Report (see reports.py) and prints it as markdown (default), csv,
or structured JSON.

Exit status: 0 success, 2 parse errors (bad files, bad arguments), 3 domain
errors (invalid parameter values), 4 cap violations.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Optional

from . import __version__
from .classical import closed_form_classical, lhv_bound
from .errors import CapExceeded, ParseError
from .expressions import BellExpression, block, builtin, is_homogeneous
from .fileio import load_expression, load_state
from .gamma import GammaScanConfig, gamma_scan
from .quantum import analytic_quantum_upper, composite_ratio_upper, seesaw_lower
from .reports import Report, new_report, render
from .werner import (
    GhzFamily,
    detect_visibility,
    ghz_separability_threshold,
    max_pair_product,
    measure_lower_bound,
    measure_monte_carlo,
    necessary_check_first_failure,
    separability_upper_bound,
    undetectable_measure_condition,
    undetectable_range_general,
    undetectable_range_homogeneous,
    visibility_lower_bound,
)

_TABLE_MS = (2, 3, 4, 5, 6)
_EXAMPLE_NAMES = ("CHSH", "MERMIN", "CH", "SASA")
_TABLE_II_DEFAULT_MAX_M = 4

_M3_R_CELL_NOTE = (
    "for m=3 the computed undetectable fraction is 93.29% while the published "
    "table prints 83.29%; the computed value is shown"
)
_PAIR_WEIGHT_NOTE = (
    "sampled membership uses the reference pair weight p(0..0) + p(1..1) > c^2, "
    "which the closed-form lower bound covers; the per-pair product variant is "
    "vacuous whenever poly + 1 >= 2^(m-1)"
)
_VARIANT_NOTE = (
    "the looser threshold (poly - 1)/sqrt(3) changes the verdict; the stricter "
    "poly/sqrt(3) - 1 form decides `satisfied`"
)
_CLOSED_FORM_NOTE = (
    "closed form exceeds the enumerated bound; it is an upper envelope, not "
    "an equality, for this expression"
)


def _threads_from(args) -> Optional[int]:
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            raise ValueError("--threads must be a positive integer")
        return args.threads
    raw = os.environ.get("BELLWERNER_THREADS", "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"BELLWERNER_THREADS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("BELLWERNER_THREADS must be a positive integer")
    return value


def _block_rows(expr: BellExpression, total: float):
    """Per-block classical values and ratios; empty blocks get gamma = inf."""
    rows = []
    gammas = []
    for i in range(1, expr.parties + 1):
        reduced = block(expr, i).reduced()
        if len(reduced) == 0:
            rows.append([i, 0.0, math.inf])
            gammas.append(math.inf)
        else:
            value = lhv_bound(reduced).value
            gamma = total / value
            rows.append([i, value, gamma])
            gammas.append(gamma)
    return rows, gammas


def cmd_bounds(args) -> Report:
    threads = _threads_from(args)
    expr = load_expression(args.expr_file)
    outcome = lhv_bound(expr)
    warnings = []

    results = {
        "parties": expr.parties,
        "terms": len(expr),
        "lhv_bound": outcome.value,
        "witness_encoding": outcome.witness.encoding,
        "witness_assignments": [list(pair) for pair in outcome.witness.assignments],
        "achieved_sign": outcome.achieved_sign,
    }

    block_rows, gammas = _block_rows(expr, outcome.value)
    results["composite_ratio_upper"] = composite_ratio_upper(gammas)
    results["tables"] = [
        {
            "title": "Blocks",
            "columns": ["i", "block_lhv", "gamma_i"],
            "rows": block_rows,
        }
    ]

    homogeneous = is_homogeneous(expr)
    results["homogeneous"] = homogeneous
    if args.closed_form and not homogeneous:
        raise ValueError("--closed-form requires a full-correlation expression")
    if homogeneous:
        cf = closed_form_classical(expr)
        uppers = analytic_quantum_upper(expr)
        results["closed_form"] = cf
        results["analytic_upper"] = uppers.general
        results["anticommuting_upper"] = uppers.anticommuting
        if cf > outcome.value + 1e-9:
            warnings.append(("closed-form-exceeds-enumeration", _CLOSED_FORM_NOTE))

    if args.seesaw:
        found = seesaw_lower(
            expr,
            restarts=args.restarts,
            seed=args.seed,
            threads=threads,
        )
        results["seesaw_lower"] = found.value
        results["seesaw_sweeps"] = len(found.sweep_values) - 1
        results["seesaw_restart_index"] = found.restart_index

    return new_report(
        "bounds",
        seed=args.seed,
        inputs={
            "expr_file": str(args.expr_file),
            "closed_form": args.closed_form,
            "seesaw": args.seesaw,
            "restarts": args.restarts,
        },
        results=results,
        warnings=warnings,
    )


def _table_i() -> tuple[dict, list]:
    rows = []
    for m in _TABLE_MS:
        rng = undetectable_range_homogeneous(m)
        rows.append(
            [
                m,
                rng.theta_lower / math.pi,
                rng.theta_upper / math.pi,
                100.0 * rng.measure,
            ]
        )
    table = {
        "title": "Undetectable GHZ windows (full-correlation expressions)",
        "columns": ["m", "theta_lower/pi", "theta_upper/pi", "r_percent"],
        "rows": rows,
    }
    return {"tables": [table]}, [("table-i-m3-r-cell", _M3_R_CELL_NOTE)]


def _table_iii() -> tuple[dict, list]:
    rows = []
    for m in _TABLE_MS:
        rng = undetectable_range_general(m, [1.0] * (m - 1))
        if rng is None:
            rows.append([m, "-", "-", "-"])
        else:
            rows.append([m, rng.theta_lower / math.pi, rng.theta_upper / math.pi, rng.measure])
    table = {
        "title": "Undetectable GHZ windows (unit block ratios)",
        "columns": ["m", "theta_lower/pi", "theta_upper/pi", "measure"],
        "rows": rows,
    }
    return {"tables": [table]}, []


def _table_ii(args, threads: Optional[int]) -> tuple[dict, list]:
    if args.max_m > _TABLE_II_DEFAULT_MAX_M and not args.force:
        raise CapExceeded(
            f"the ratio scan above m = {_TABLE_II_DEFAULT_MAX_M} is expensive; "
            "pass --force to run it"
        )
    warnings = []
    rows = []
    for m in range(2, args.max_m + 1):
        n = args.samples if m <= 4 else max(1, args.samples // 10)
        scanned = gamma_scan(
            GammaScanConfig(parties=m, samples=n, seed=args.seed), threads=threads
        )
        row = [m, n]
        skipped = 0
        for i in range(1, 7):
            if i > m:
                row.append("-")
                continue
            est = scanned.estimates[i - 1]
            skipped += est.skipped
            row.append("-" if est.gamma_min is None else est.gamma_min)
        rows.append(row)
        if skipped:
            warnings.append(
                (
                    "skipped-samples",
                    f"m={m}: {skipped} block evaluations fell below the "
                    "magnitude floor and were skipped",
                )
            )
    table = {
        "title": "Sampled block-ratio minima",
        "columns": ["m", "samples"] + [f"gamma_{i}" for i in range(1, 7)],
        "rows": rows,
    }
    return {"tables": [table]}, warnings


def cmd_tables(args) -> Report:
    threads = _threads_from(args)
    which = args.which.upper()
    if which == "I":
        results, warnings = _table_i()
    elif which == "II":
        results, warnings = _table_ii(args, threads)
    else:
        results, warnings = _table_iii()
    return new_report(
        "tables",
        seed=args.seed,
        inputs={
            "which": which,
            "samples": args.samples,
            "max_m": args.max_m,
            "force": args.force,
        },
        results=results,
        warnings=warnings,
    )


def _detection_block(expr_file, family, args, threads: Optional[int]) -> dict:
    expr = load_expression(expr_file)
    outcome = lhv_bound(expr)
    out = {
        "expr_file": str(expr_file),
        "classical_bound": outcome.value,
        "detect_visibility": detect_visibility(
            expr, family, args.seed, restarts=args.restarts, threads=threads
        ),
    }
    if is_homogeneous(expr):
        upper = analytic_quantum_upper(expr).general
        if upper > outcome.value:
            out["visibility_lower_bound"] = visibility_lower_bound(
                expr.parties, outcome.value, upper
            )
    return out


def cmd_werner(args) -> Report:
    threads = _threads_from(args)
    warnings = []
    if args.family == "ghz":
        family = GhzFamily(args.m, args.theta)
        amps = family.state_vector()
        rng = undetectable_range_homogeneous(args.m)
        results = {
            "parties": args.m,
            "theta": args.theta,
            "separability_threshold": ghz_separability_threshold(args.m, args.theta),
            "separability_upper_bound": separability_upper_bound(amps),
            "necessary_check_first_failure": necessary_check_first_failure(amps),
            "undetectable_theta_lower": rng.theta_lower,
            "undetectable_theta_upper": rng.theta_upper,
            "undetectable_measure": rng.measure,
        }
        inputs = {"family": "ghz", "m": args.m, "theta": args.theta}
    else:
        family = load_state(args.state)
        amps = family.state_vector()
        results = {
            "parties": family.parties,
            "separability_upper_bound": separability_upper_bound(amps),
            "max_pair_product": max_pair_product(amps),
            "necessary_check_first_failure": necessary_check_first_failure(amps),
        }
        inputs = {"family": "pure", "state_file": str(args.state)}
    if args.expr:
        detection = _detection_block(args.expr, family, args, threads)
        vlb = detection.get("visibility_lower_bound")
        if vlb is not None and "separability_threshold" in results:
            # a gap between the two certifies Werner states no expression
            # of this strength can flag
            detection["undetectable_window"] = vlb > results["separability_threshold"]
        results["detection"] = detection
        inputs["expr_file"] = str(args.expr)
    inputs["restarts"] = args.restarts
    return new_report(
        "werner", seed=args.seed, inputs=inputs, results=results, warnings=warnings
    )


def cmd_measure(args) -> Report:
    threads = _threads_from(args)
    bound = measure_lower_bound(args.m, args.poly)
    est = measure_monte_carlo(args.m, args.poly, args.samples, args.seed, threads=threads)
    high = est.fraction + 3.0 * est.std_error
    results = {
        "lower_bound": bound,
        "fraction": est.fraction,
        "std_error": est.std_error,
        "hits": est.hits,
        "samples": est.samples,
        "fraction_plus_3se": high,
        "bound_consistent": bool(high >= bound),
    }
    return new_report(
        "measure",
        seed=args.seed,
        inputs={"m": args.m, "poly": args.poly, "samples": args.samples},
        results=results,
        warnings=[("membership-pair-weight", _PAIR_WEIGHT_NOTE)],
    )


def cmd_gamma(args) -> Report:
    threads = _threads_from(args)
    scanned = gamma_scan(
        GammaScanConfig(parties=args.m, samples=args.samples, seed=args.seed),
        threads=threads,
    )
    rows = []
    for est in scanned.estimates:
        rows.append(
            [
                est.index,
                "-" if est.gamma_min is None else est.gamma_min,
                "-" if est.witness_sample is None else est.witness_sample,
                est.skipped,
            ]
        )
    results = {
        "parties": scanned.parties,
        "samples": scanned.samples,
        "tables": [
            {
                "title": "Sampled block-ratio minima",
                "columns": ["i", "gamma_min", "witness_sample", "skipped"],
                "rows": rows,
            }
        ],
    }
    return new_report(
        "gamma",
        seed=args.seed,
        inputs={"m": args.m, "samples": args.samples},
        results=results,
    )


def cmd_examples(args) -> Report:
    threads = _threads_from(args)
    warnings = []
    bound_rows = []
    ratio_rows = []
    verdict_rows = []
    for name in _EXAMPLE_NAMES:
        expr = builtin(name)
        m = expr.parties
        outcome = lhv_bound(expr)
        homogeneous = is_homogeneous(expr)
        cf = closed_form_classical(expr) if homogeneous else None
        upper = analytic_quantum_upper(expr).general if homogeneous else None
        found = seesaw_lower(
            expr, restarts=args.restarts, seed=args.seed, threads=threads
        )
        _, gammas = _block_rows(expr, outcome.value)
        composite = composite_ratio_upper(gammas)
        bound_rows.append(
            [
                name,
                m,
                outcome.value,
                "-" if cf is None else cf,
                found.value,
                "-" if upper is None else upper,
                composite,
            ]
        )
        if cf is not None and cf > outcome.value + 1e-9:
            warnings.append(
                ("closed-form-exceeds-enumeration", f"{name}: {_CLOSED_FORM_NOTE}")
            )
        for i, g in enumerate(gammas, start=1):
            ratio_rows.append([name, i, g])

        condition = undetectable_measure_condition(m, gammas[: m - 1], composite)
        window = undetectable_range_general(m, gammas[: m - 1])
        verdict_rows.append(
            [
                name,
                condition.sum_inverse_gammas,
                condition.strict_form,
                condition.loose_form,
                "-" if window is None else window.theta_lower / math.pi,
                "-" if window is None else window.theta_upper / math.pi,
            ]
        )
        if condition.strict_form != condition.loose_form:
            warnings.append(("loose-threshold-variant", f"{name}: {_VARIANT_NOTE}"))

    results = {
        "tables": [
            {
                "title": "Bounds",
                "columns": [
                    "example",
                    "m",
                    "lhv",
                    "closed_form",
                    "seesaw",
                    "analytic_upper",
                    "composite_ratio_upper",
                ],
                "rows": bound_rows,
            },
            {
                "title": "Block ratios",
                "columns": ["example", "i", "gamma_i"],
                "rows": ratio_rows,
            },
            {
                "title": "Condition verdicts",
                "columns": [
                    "example",
                    "sum_inverse_gammas",
                    "measure_condition",
                    "measure_condition_variant",
                    "theta_lower/pi",
                    "theta_upper/pi",
                ],
                "rows": verdict_rows,
            },
        ]
    }
    return new_report(
        "examples",
        seed=args.seed,
        inputs={"restarts": args.restarts},
        results=results,
        warnings=warnings,
    )


def _add_common(p, *, seed=True, threads=True) -> None:
    if seed:
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    if threads:
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker cap (default: BELLWERNER_THREADS or serial)",
        )
    p.add_argument(
        "--format",
        choices=("markdown", "csv", "structured"),
        default="markdown",
        help="output format (structured = machine-readable JSON)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellwerner",
        description="Bounds, detectability, and block-ratio analysis for "
        "two-setting Bell expressions.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="classical/quantum bounds for an expression file")
    p.add_argument("expr_file", metavar="EXPR-FILE", help="expression JSON file")
    p.add_argument(
        "--closed-form",
        action="store_true",
        help="require the full-correlation closed form (error if inapplicable)",
    )
    p.add_argument("--seesaw", action="store_true", help="run the see-saw lower bound")
    p.add_argument("--restarts", type=int, default=20, help="see-saw restarts")
    _add_common(p)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("tables", help="reproduce the summary tables")
    p.add_argument(
        "which", type=str.upper, choices=("I", "II", "III"), help="table selector"
    )
    p.add_argument("--samples", type=int, default=10000, help="samples per m (table II)")
    p.add_argument(
        "--max-m",
        type=int,
        default=_TABLE_II_DEFAULT_MAX_M,
        choices=range(2, 7),
        help="largest party count for table II",
    )
    p.add_argument(
        "--force", action="store_true", help="allow table II above the default cap"
    )
    _add_common(p)
    p.set_defaults(handler=cmd_tables)

    p = sub.add_parser("werner", help="Werner-state detectability analysis")
    fam = p.add_subparsers(dest="family", required=True)
    g = fam.add_parser("ghz", help="GHZ-type family cos(theta)|0..0> + sin(theta)|1..1>")
    g.add_argument("--m", type=int, required=True, help="party count")
    g.add_argument("--theta", type=float, required=True, help="angle in (0, pi/2)")
    g.add_argument("--expr", default=None, help="optional expression file to test against")
    g.add_argument("--restarts", type=int, default=20, help="see-saw restarts")
    _add_common(g)
    g.set_defaults(handler=cmd_werner)
    q = fam.add_parser("pure", help="arbitrary pure state from a state file")
    q.add_argument("--state", required=True, help="state JSON file")
    q.add_argument("--expr", default=None, help="optional expression file to test against")
    q.add_argument("--restarts", type=int, default=20, help="see-saw restarts")
    _add_common(q)
    q.set_defaults(handler=cmd_werner)

    p = sub.add_parser("measure", help="sampled share of states past the pair-weight mark")
    p.add_argument("--m", type=int, required=True, help="party count")
    p.add_argument("--poly", type=float, required=True, help="expression value at the target")
    p.add_argument("--samples", type=int, default=100000, help="Monte Carlo samples")
    _add_common(p)
    p.set_defaults(handler=cmd_measure)

    p = sub.add_parser("gamma", help="sampled block-ratio minima over random vectors")
    p.add_argument("--m", type=int, required=True, help="party count")
    p.add_argument("--samples", type=int, default=10000, help="random vectors to draw")
    _add_common(p)
    p.set_defaults(handler=cmd_gamma)

    p = sub.add_parser("examples", help="run the built-in expressions end to end")
    p.add_argument("--restarts", type=int, default=20, help="see-saw restarts")
    _add_common(p)
    p.set_defaults(handler=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.handler(args)
        text = render(report, args.format)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
