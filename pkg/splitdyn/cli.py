"""
Command-line front end: `splitdyn <command> [flags]`.

Exit codes: 0 ok, 1 unexpected failure, 2 input degeneracy, 3 budget exhausted,
4 numeric failure (see utils.error_codes).
"""
import argparse
import logging
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from .arith import parse_point, point_from_fraction
from .config import PCF_BUDGET, Settings, load_settings
from .dynamics import classify_exceptional, is_pcf, preperiodic_points, rational_preperiodic_points
from .families import (
    bad_parameters,
    dky_scan,
    fiber_small_points,
    fit_height_inequality,
    isotrivial_check,
    preperiodic_curve_parameters,
    small_curve_scan,
)
from .heights import bad_primes, canonical_height, height_csv_row, naive_height
from .io import (
    CommandOutput,
    fmt,
    load_curve,
    load_family,
    load_map,
    parse_grid,
    parse_section,
    render,
    write_output,
)
from .measures import (
    angle_ks_distance,
    arakelov_zhang_estimate,
    arcsine_ks_distance,
    backward_sample,
    measure_csv_rows,
    measure_equality_test,
    measure_provenance,
)
from .scan_executor import ScanExecutor
from .types import RunConfig
from .utils import DegenerateFiber, InvalidInput, SpecialCurve, SplitDynError, get_error_message, get_exit_code

logger = logging.getLogger(__name__)


# --- Commands ---

def cmd_height(args: argparse.Namespace, config: RunConfig, settings: Settings) -> CommandOutput:
    f = config.inputs["map"]
    point = parse_point(args.point)
    estimate = canonical_height(f, point, config.target_error, settings.height_max_iters)
    primes = list(bad_primes(f))
    result = {
        "point": point,
        "value": estimate.value,
        "error": estimate.error,
        "places": {str(place): v for place, v in estimate.place_breakdown},
    }
    header = ["point", "value", "error", "arch"] + [f"badprime_{p}" for p in primes]
    return CommandOutput(result, header, [height_csv_row(point, estimate, primes)])


def cmd_prep(args: argparse.Namespace, config: RunConfig, settings: Settings) -> CommandOutput:
    f = config.inputs["map"]
    m, n = config.budget_m, config.budget_n
    rational = rational_preperiodic_points(f, m, n, bit_cap=settings.bit_cap)
    points = preperiodic_points(
        f,
        m,
        n,
        tol=config.tol,
        seed=config.seed,
        degree_cap=settings.degree_cap,
        bit_cap=settings.bit_cap,
        max_iter=settings.root_max_iter,
    )
    result = {"m": m, "n": n, "rational": rational, "complex": points, "count": len(points)}
    rows = [["rational", str(p)] for p in rational] + [["complex", str(p)] for p in points]
    return CommandOutput(result, ["kind", "point"], rows)


def cmd_classify(args: argparse.Namespace, config: RunConfig, settings: Settings) -> CommandOutput:
    f = config.inputs["map"]
    verdict = classify_exceptional(f, PCF_BUDGET, bit_cap=settings.bit_cap)
    pcf = is_pcf(f, PCF_BUDGET, bit_cap=settings.bit_cap)
    result = {"class": verdict, "pcf": pcf}
    return CommandOutput(result, ["tag", "pcf", "evidence"], [[verdict.tag, str(pcf), "; ".join(verdict.evidence)]])


def cmd_measure(args: argparse.Namespace, config: RunConfig, settings: Settings) -> CommandOutput:
    f = config.inputs["map"]
    mu = backward_sample(
        f,
        complex(args.z0),
        depth=config.depth,
        width=config.width,
        seed=config.seed,
        trajectory=args.trajectory,
        burn_in=settings.burn_in,
        max_iter=settings.root_max_iter,
    )
    ks_angle, _ = angle_ks_distance(mu)
    ks_arcsine, _ = arcsine_ks_distance(mu)
    summary = dict(measure_provenance(mu), ks_angle=ks_angle, ks_arcsine=ks_arcsine)
    return CommandOutput(summary, ["re", "im", "weight"], measure_csv_rows(mu), sidecar=summary)


def cmd_energy(args: argparse.Namespace, config: RunConfig, settings: Settings) -> CommandOutput:
    decision = measure_equality_test(
        config.inputs["map1"],
        config.inputs["map2"],
        config.inputs["curve"],
        depth=config.depth,
        width=config.width,
        seed=config.seed,
        resamples=settings.bootstrap_resamples,
        tol=config.tol,
        max_iter=settings.root_max_iter,
    )
    row = [decision.decision, fmt(decision.statistic), fmt(decision.se)]
    return CommandOutput(decision.to_dict(), ["decision", "statistic", "se"], [row])


def cmd_az(args: argparse.Namespace, config: RunConfig, settings: Settings) -> CommandOutput:
    estimate = arakelov_zhang_estimate(
        config.inputs["map1"],
        config.inputs["map2"],
        args.n,
        config.target_error,
        config.tol,
        degree_cap=settings.degree_cap,
        bit_cap=settings.bit_cap,
        max_iter=settings.root_max_iter,
    )
    result = {"n": args.n, "value": estimate.value, "error": estimate.error}
    return CommandOutput(result, ["n", "value", "error"], [[str(args.n), fmt(estimate.value), fmt(estimate.error)]])


def _scan_small_points(args, config: RunConfig) -> CommandOutput:
    F, C, grid = config.inputs["family"], config.inputs["curve"], config.inputs["grid"]
    budget = (config.budget_m, config.budget_n)

    def run(t: Fraction):
        try:
            return fiber_small_points(F, C, t, args.eps, budget, config.tol)
        except (DegenerateFiber, SpecialCurve) as e:
            logger.warning("t=%s skipped: %s", t, e)
            return None

    reports = ScanExecutor(config.threads).map(run, grid)
    rows, entries, skipped = [], [], []
    for t, report in zip(grid, reports):
        if report is None:
            skipped.append(t)
            continue
        h_t = naive_height(point_from_fraction(t))
        rows.append([str(t), fmt(h_t), str(report.count), fmt(report.empirical_min)])
        entries.append({"t": t, "h_t": h_t, "count": report.count, "min_height": report.empirical_min})
    result = {"eps": args.eps, "cells": entries, "skipped": skipped}
    return CommandOutput(result, ["t", "h_t", "count", "min_height"], rows)


def cmd_family_scan(args: argparse.Namespace, config: RunConfig, settings: Settings) -> CommandOutput:
    F, grid = config.inputs["family"], config.inputs["grid"]
    mode = args.mode
    if mode == "auto":
        mode = "fit" if args.section is not None else "small"
    if mode == "fit":
        if args.section is None:
            raise InvalidInput("Error running family-scan: fit mode needs --section")
        fit = fit_height_inequality(F, config.inputs["section"], grid, config.target_error)
        rows = [[fmt(h), fmt(v)] for h, v in fit.support]
        return CommandOutput(fit, ["h_t", "height"], rows)
    if mode == "info":
        bad = bad_parameters(F, config.tol)
        result = {"bad_parameters": bad, "isotriviality": isotrivial_check(F, tol=config.tol)}
        rows = [["rational", str(t)] for t in bad.rational] + [["complex", f"{z.real:.17g}{z.imag:+.17g}j"] for z in bad.complex]
        return CommandOutput(result, ["kind", "t"], rows)
    if "curve" not in config.inputs:
        raise InvalidInput(f"Error running family-scan: {mode} mode needs --curve")
    if mode == "small":
        return _scan_small_points(args, config)
    if mode == "curve-prep":
        found = preperiodic_curve_parameters(F, config.inputs["curve"], grid)
        return CommandOutput({"parameters": found}, ["t"], [[str(t)] for t in found])
    small = small_curve_scan(F, grid, args.n, args.eps, config.target_error)
    result = {"n": args.n, "eps": args.eps, "parameters": [{"t": t, "value": v} for t, v in small]}
    return CommandOutput(result, ["t", "value"], [[str(t), fmt(v)] for t, v in small])


def cmd_dky(args: argparse.Namespace, config: RunConfig, settings: Settings) -> CommandOutput:
    table = dky_scan(
        config.inputs["t1"],
        config.inputs["t2"],
        eps=args.eps,
        budget=(config.budget_m, config.budget_n),
        C=config.inputs.get("curve"),
        threads=config.threads,
    )
    rows = [[str(c.t1), str(c.t2), str(c.count)] for c in table.cells]
    result = {"cells": table.cells, "rejected": table.rejected, "max_count": table.max_count}
    return CommandOutput(result, ["t1", "t2", "count"], rows)


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig, Settings], CommandOutput]] = {
    "height": cmd_height,
    "prep": cmd_prep,
    "classify": cmd_classify,
    "measure": cmd_measure,
    "energy": cmd_energy,
    "az": cmd_az,
    "family-scan": cmd_family_scan,
    "dky": cmd_dky,
}


# --- Parser ---

def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Master seed (default: 0)")
    common.add_argument("--tol", type=float, default=None, help="Numeric tolerance (default: SD_TOL or 1e-8)")
    common.add_argument("--target-error", type=float, default=1e-6, help="Certified height error (default: 1e-6)")
    common.add_argument("--budget-m", type=int, default=None, help="Preperiodic tail budget m")
    common.add_argument("--budget-n", type=int, default=None, help="Preperiodic period budget n")
    common.add_argument("--depth", type=int, default=20, help="Backward walk depth (default: 20)")
    common.add_argument("--width", type=int, default=10000, help="Number of backward walks (default: 10000)")
    common.add_argument("--emit", choices=["csv", "json"], default="json", help="Output format (default: json)")
    common.add_argument("--out", default=None, help="Output path (default: stdout)")
    common.add_argument("--env-file", default=None, help=".env file read before SD_* lookups")
    common.add_argument("--verbose", action="store_true", help="Debug logging on stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="splitdyn", description="Heights, preperiodic points and equidistribution for split maps of P^1 x P^1.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("height", parents=[common], help="Canonical height of a rational point")
    p.add_argument("--map", required=True, help="Map alias or JSON file")
    p.add_argument("--point", required=True, help='Rational point, e.g. "3/2" or "inf"')

    p = sub.add_parser("prep", parents=[common], help="Preperiodic points with (m, n) = (budget-m, budget-n)")
    p.add_argument("--map", required=True)

    p = sub.add_parser("classify", parents=[common], help="Exceptional class of a map")
    p.add_argument("--map", required=True)

    p = sub.add_parser("measure", parents=[common], help="Backward-iteration sample of the maximal entropy measure")
    p.add_argument("--map", required=True)
    p.add_argument("--z0", default="0.3+0.7j", help="Starting point (default: 0.3+0.7j)")
    p.add_argument("--trajectory", action="store_true", help="Record every level after burn-in")

    p = sub.add_parser("energy", parents=[common], help="Energy test of pulled-back measures on a curve")
    p.add_argument("--map1", required=True)
    p.add_argument("--map2", required=True)
    p.add_argument("--curve", default="diagonal", help="Curve alias or JSON file (default: diagonal)")

    p = sub.add_parser("az", parents=[common], help="Arakelov-Zhang surrogate over periodic points")
    p.add_argument("--map1", required=True)
    p.add_argument("--map2", required=True)
    p.add_argument("--n", type=int, default=4, help="Period (default: 4)")

    p = sub.add_parser("family-scan", parents=[common], help="Scan a family over a parameter grid")
    p.add_argument("--family", required=True, help="Family alias or JSON file")
    p.add_argument("--grid", required=True, help='"a..b" or a comma-separated list')
    p.add_argument("--section", default=None, help="Section coefficients in t, ascending, comma-separated")
    p.add_argument("--curve", default=None)
    p.add_argument("--mode", choices=["auto", "fit", "small", "curve-prep", "az", "info"], default="auto")
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--n", type=int, default=4)

    p = sub.add_parser("dky", parents=[common], help="Common small points of (z^2 + t1, z^2 + t2)")
    p.add_argument("--t1", required=True, help="Grid of t1 values")
    p.add_argument("--t2", required=True, help="Grid of t2 values")
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--curve", default=None)
    return parser


def _inputs(args: argparse.Namespace) -> Dict:
    inputs = {}
    for key in ("map", "map1", "map2"):
        if getattr(args, key, None) is not None:
            inputs[key] = load_map(getattr(args, key))
    if getattr(args, "curve", None) is not None:
        inputs["curve"] = load_curve(args.curve)
    if getattr(args, "family", None) is not None:
        inputs["family"] = load_family(args.family)
    if getattr(args, "grid", None) is not None:
        inputs["grid"] = parse_grid(args.grid)
    if getattr(args, "section", None) is not None:
        inputs["section"] = parse_section(args.section)
    for key in ("t1", "t2"):
        if getattr(args, key, None) is not None:
            inputs[key] = parse_grid(getattr(args, key))
    if getattr(args, "point", None) is not None:
        inputs["point"] = args.point
    return inputs


def make_run_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    """Resolve flags over settings; every tolerance and budget must be positive."""
    tol = args.tol if args.tol is not None else settings.tol
    budget_m = args.budget_m if args.budget_m is not None else settings.budget_m
    budget_n = args.budget_n if args.budget_n is not None else settings.budget_n
    if tol <= 0 or args.target_error <= 0:
        raise InvalidInput("Error reading flags: tolerances must be positive")
    if budget_m < 0 or budget_n < 1 or args.depth < 1 or args.width < 1:
        raise InvalidInput("Error reading flags: budgets must be positive")
    return RunConfig(
        command=args.command,
        inputs=_inputs(args),
        seed=args.seed,
        tol=tol,
        target_error=args.target_error,
        budget_m=budget_m,
        budget_n=budget_n,
        depth=args.depth,
        width=args.width,
        emit=args.emit,
        out=args.out,
        threads=settings.threads,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        settings = load_settings(args.env_file)
        config = make_run_config(args, settings)
        output = COMMANDS[args.command](args, config, settings)
        text, sidecar = render(config, output)
        write_output(text, config.out, sidecar)
    except SplitDynError as e:
        logger.error(get_error_message(e))
        return get_exit_code(e)
    except Exception as e:
        logger.error(f"Error running {args.command}: {e}")
        return 1
    return 0


def run() -> None:
    sys.exit(main())


__all__ = ['build_parser', 'make_run_config', 'main', 'run', 'COMMANDS']


if __name__ == "__main__":
    run()
