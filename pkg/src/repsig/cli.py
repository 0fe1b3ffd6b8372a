"""Command-line interface.

Subcommands::

    repsig table      reliability table in the layout of the published tables
    repsig curve      full-precision reliability curve as CSV or JSON
    repsig signature  retained signature terms and the geometric tail
    repsig simulate   Monte Carlo diagnostics against the analytic curve

Exit status is 0 on success, 2 on usage errors and 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Sequence

import numpy as np

from .distributions import Rates
from .montecarlo import SimConfig, compare_analytic, geometric_fit
from .reliability import TOPOLOGIES, RepairableSpec, reliability_curve
from .signature import DEFAULT_EPS, Truncation, truncate

FOUR_PLACES = Decimal("0.0001")


class UsageError(Exception):
    pass


def round4(value: float) -> str:
    """Half-even rounding of the exact binary value to 4 decimals."""
    return str(Decimal(float(value)).quantize(FOUR_PLACES, rounding=ROUND_HALF_EVEN))


def format_time(t: float) -> str:
    t = float(t)
    return str(int(t)) if t.is_integer() else repr(t)


def make_grid(t_max: float, t_step: float) -> list[float]:
    """``t_step, 2 t_step, ..., <= t_max``."""
    count = int(math.floor(t_max / t_step + 1e-9))
    return [round(i * t_step, 12) for i in range(1, count + 1)]


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=float, default=0.1, help="failure rate")
    common.add_argument("--mu", type=float, default=0.2, help="repair rate")
    common.add_argument("--topology", choices=TOPOLOGIES, default="parallel2")
    common.add_argument("--n", type=int, default=None, help="component count for parallelN")
    common.add_argument("--q", type=float, default=None, help="series failure probability for remark5")
    common.add_argument("--t-max", type=float, default=40.0)
    common.add_argument("--t-step", type=float, default=1.0)
    trunc = common.add_mutually_exclusive_group()
    trunc.add_argument("--terms", type=int, default=None, help="retain K nonzero signature terms")
    trunc.add_argument("--eps", type=float, default=None, help="retain until discarded mass <= eps")
    common.add_argument("--format", choices=("table", "csv", "json"), default=None)
    common.add_argument("-o", "--output", default=None, help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="repsig", description="Signatures and reliability of repairable systems."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    table = sub.add_parser("table", parents=[common], help="published-table layout")
    table.add_argument("--blocks", type=int, default=2, help="side-by-side column pairs")
    sub.add_parser("curve", parents=[common], help="CSV or JSON curve")
    sub.add_parser("signature", parents=[common], help="signature terms")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo diagnostics")
    sim.add_argument("--reps", type=int, default=100_000)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--first-gap", choices=("single", "racing"), default="single")
    return parser


def _spec(args) -> RepairableSpec:
    try:
        rates = Rates(args.lam, args.mu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.topology == "parallelN" and (args.n is None or args.n < 2):
        raise UsageError("--topology parallelN needs --n >= 2")
    if args.topology == "remark5" and (args.q is None or not 0.0 <= args.q <= 1.0):
        raise UsageError("--topology remark5 needs --q in [0, 1]")
    return RepairableSpec(args.topology, rates, n=args.n, q=args.q)


def _truncation(args) -> Truncation:
    try:
        if args.terms is not None:
            return Truncation.by_count(args.terms)
        return Truncation.by_mass(DEFAULT_EPS if args.eps is None else args.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _grid(args) -> list[float]:
    if not args.t_step > 0 or not args.t_max >= 0:
        raise UsageError("--t-step must be positive and --t-max nonnegative")
    return make_grid(args.t_max, args.t_step)


def _format(args, allowed: Sequence[str], default: str) -> str:
    fmt = args.format or default
    if fmt not in allowed:
        raise UsageError(f"{args.command} does not support --format {fmt}")
    return fmt


def render_table(curve, blocks: int = 2) -> str:
    rates = curve.rates
    lines = [f"SYSTEM RELIABILITY FOR lambda = {rates.lam:g} AND mu = {rates.mu:g}"]
    n = len(curve)
    blocks = max(1, min(blocks, n)) if n else 1
    rows = math.ceil(n / blocks) if n else 0
    used = math.ceil(n / rows) if rows else 1
    lines.append("\t".join(["t\tReliability"] * used))
    for r in range(rows):
        cells = []
        for idx in range(r, n, rows):
            cells += [format_time(curve.grid[idx]), round4(curve.values[idx])]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def render_csv(curve) -> str:
    out = ["t,reliability"]
    out += [f"{format_time(t)},{float(v)!r}" for t, v in zip(curve.grid, curve.values)]
    return "\n".join(out) + "\n"


def curve_json(curve) -> dict:
    return {
        "topology": curve.topology,
        "lambda": curve.rates.lam,
        "mu": curve.rates.mu,
        "terms": curve.terms,
        "tail_mass": curve.tail_mass,
        "grid": [float(t) for t in curve.grid],
        "values": [float(v) for v in curve.values],
    }


def cmd_table(args) -> str:
    _format(args, ("table",), "table")
    if args.blocks < 1:
        raise UsageError("--blocks must be >= 1")
    curve = reliability_curve(_spec(args), _grid(args), _truncation(args))
    return render_table(curve, args.blocks)


def cmd_curve(args) -> str:
    fmt = _format(args, ("csv", "json", "table"), "csv")
    curve = reliability_curve(_spec(args), _grid(args), _truncation(args))
    if fmt == "json":
        return json.dumps(curve_json(curve)) + "\n"
    if fmt == "table":
        return render_table(curve)
    return render_csv(curve)


def cmd_signature(args) -> str:
    fmt = _format(args, ("table", "json"), "table")
    spec = _spec(args)
    sig = spec.signature()
    kept = truncate(sig, _truncation(args))
    if fmt == "json":
        payload = {
            "topology": spec.topology,
            "xi": spec.xi,
            "terms": [[j, v] for j, v in kept.terms],
            "tail_mass": kept.tail_mass,
            "tail": sig.describe_tail(),
        }
        return json.dumps(payload) + "\n"
    lines = [f"topology {spec.topology}, xi = {spec.xi:.6g}"]
    lines += [f"s_{j} = {round4(v)}" for j, v in kept.terms]
    lines.append(f"tail_mass = {round4(kept.tail_mass)}")
    tail = sig.describe_tail()
    lines.append(
        f"tail: coefficient = {tail['coefficient']:.6g}, ratio = {tail['ratio']:.6g}, "
        f"start = {tail['start']}"
    )
    return "\n".join(lines) + "\n"


def _simulation_report(report, cfg: SimConfig, fit) -> dict:
    dev, where = report.max_abs_deviation
    sim = report.simulation
    return {
        "topology": "parallel2",
        "lambda": cfg.rates.lam,
        "mu": cfg.rates.mu,
        "replications": sim.replications,
        "seed": cfg.seed,
        "first_gap": cfg.first_gap,
        "flagged": sim.flagged,
        "terms": report.terms,
        "retained_mass": report.retained_mass,
        "tail_mass": report.tail_mass,
        "grid": [float(t) for t in report.grid],
        "analytic": [float(v) for v in report.analytic],
        "empirical": [float(v) for v in report.empirical],
        "std_errors": [float(v) for v in report.std_errors],
        "deviation": [float(v) for v in report.deviation],
        "max_abs_deviation": dev,
        "max_abs_deviation_t": where,
        "histogram": {str(k): c for k, c in sim.histogram.items()},
        "geometric_fit": fit.to_dict(),
    }


def _simulation_text(d: dict, xi: float) -> str:
    lines = [
        f"simulation parallel2 lambda = {d['lambda']:g} mu = {d['mu']:g} "
        f"reps = {d['replications']} seed = {d['seed']} first_gap = {d['first_gap']}",
        f"analytic terms = {d['terms']} retained_mass = {d['retained_mass']:.6f} "
        f"tail_mass = {d['tail_mass']:.6f}",
        "t\tanalytic\tempirical\tstd_error\tdeviation",
    ]
    for row in zip(d["grid"], d["analytic"], d["empirical"], d["std_errors"], d["deviation"]):
        t, a, e, s, dv = row
        lines.append(f"{format_time(t)}\t{a:.6f}\t{e:.6f}\t{s:.6f}\t{dv:+.6f}")
    if d["max_abs_deviation_t"] is not None:
        lines.append(
            f"max |deviation| = {d['max_abs_deviation']:.6f} "
            f"at t = {format_time(d['max_abs_deviation_t'])}"
        )
    total = sum(d["histogram"].values())
    lines.append(f"failure index histogram (xi = {xi:.6f}, flagged = {d['flagged']})")
    lines.append("N\tcount\tfrequency\texpected")
    for k, c in d["histogram"].items():
        expected = (1.0 - xi) * xi ** (int(k) - 2)
        lines.append(f"{k}\t{c}\t{c / total:.6f}\t{expected:.6f}")
    fit = d["geometric_fit"]
    lines.append(
        f"mean N = {fit['mean_index']:.6f} (s.e. {fit['mean_index_se']:.6f}), "
        f"expected {fit['expected_mean']:.6f}"
    )
    lines.append(f"chi2 = {fit['chi2']:.4f} dof = {fit['dof']} p-value = {fit['pvalue']:.4f}")
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> str:
    fmt = _format(args, ("table", "json"), "table")
    spec = _spec(args)
    if spec.topology != "parallel2":
        raise UsageError("simulate supports --topology parallel2 only")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    seed = args.seed
    if seed is None:
        seed = int(np.random.SeedSequence().entropy) % 2**64
    if not 0 <= seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    cfg = SimConfig(
        spec.rates,
        args.reps,
        seed,
        tuple(_grid(args)),
        workers=args.workers,
        first_gap=args.first_gap,
    )
    report = compare_analytic(cfg, _truncation(args))
    fit = geometric_fit(report.simulation.histogram, spec.xi)
    d = _simulation_report(report, cfg, fit)
    if fmt == "json":
        return json.dumps(d) + "\n"
    return _simulation_text(d, spec.xi)


COMMANDS = {
    "table": cmd_table,
    "curve": cmd_curve,
    "signature": cmd_signature,
    "simulate": cmd_simulate,
}


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    parser = _build_parser()
    stdout = stdout or sys.stdout
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"repsig: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"repsig: {exc}", file=sys.stderr)
        return 1
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except OSError as exc:
        print(f"repsig: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
