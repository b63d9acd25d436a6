"""Command-line interface for batch runs and reproducing the headline numbers.

Subcommands
-----------
series      print a generating function as JSON (or CSV rows)
enumerate   dump an exact pairing count table as CSV (or JSON)
constants   print the constants table
crosscheck  closed forms vs. the enumeration oracle; nonzero exit on mismatch
asymptotics ratio-method growth/exponent estimate with full diagnostics

Exit codes: 0 success, 1 crosscheck mismatch, 2 usage error.  The worker
count for enumerations comes from --threads or LINKCENSUS_THREADS (default:
hardware parallelism); identical configurations produce byte-identical
output whatever the worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import abab, census, flype, onematrix, oracle
from .series import Series, rational_to_str

__all__ = ["RunConfig", "run", "main"]


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation, fully resolved."""

    command: str                 # series | enumerate | constants | crosscheck | asymptotics
    model: str = "reduced"       # raw | reduced | flype | on | two-color
    what: str = "links"          # links | tangles
    n: Fraction = Fraction(1)    # loop weight for model "on"
    reduced: bool = False        # renormalized variant for "on"/"two-color"
    order: int = 8
    vertices: int = 3
    vmax: int = 4
    planar: bool = False
    connected: bool = False
    tangencies: int = 0
    sequence: str = "reduced-links"
    terms: int = 12
    output: str = "json"         # json | csv
    threads: int | None = None


def _series_for(config: RunConfig) -> Series:
    model, what, order = config.model, config.what, config.order
    if model == "raw":
        return (onematrix.free_energy_raw_series(order) if what == "links"
                else onematrix.gamma_raw_series(order))
    if model == "reduced":
        return (onematrix.free_energy_reduced_series(order) if what == "links"
                else onematrix.gamma_reduced_series(order))
    if model == "flype":
        if what != "tangles":
            raise ValueError("the flype correction is computed for tangles")
        return flype.gamma_tilde(order)
    if model == "on":
        if what != "links":
            raise ValueError("loop-weight series are computed for links")
        return oracle.free_energy_series(order, n=config.n, threads=config.threads)
    if model == "two-color":
        if what != "links":
            raise ValueError("two-color series are computed for links")
        return abab.two_color_series(order, reduced=config.reduced,
                                     threads=config.threads)
    raise ValueError(f"unknown model {model!r}")


def _emit_series(series: Series, output: str) -> str:
    if output == "json":
        return json.dumps(series.to_json_dict(), sort_keys=True)
    lines = ["p,count"]
    lines.extend(f"{p},{rational_to_str(c)}" for p, c in enumerate(series.coeffs))
    return "\n".join(lines) + "\n"


def _cmd_series(config: RunConfig) -> int:
    print(_emit_series(_series_for(config), config.output))
    return 0


def _cmd_enumerate(config: RunConfig) -> int:
    if config.tangencies:
        counts = {"crossing": config.vertices - config.tangencies,
                  "tangency": config.tangencies}
        table = oracle.enumerate_pairings(
            config.vertices, oracle.VertexModel.generalized(), type_counts=counts,
            planar_only=config.planar, connected_only=config.connected,
            threads=config.threads)
    else:
        table = oracle.enumerate_pairings(
            config.vertices, planar_only=config.planar,
            connected_only=config.connected, threads=config.threads)
    if config.output == "csv":
        sys.stdout.write(oracle.count_table_csv([table]))
    else:
        payload = {
            "V": table.num_vertices,
            "vertex_type_counts": dict(table.vertex_counts),
            "planar_only": table.planar_only,
            "connected_only": table.connected_only,
            "cells": [
                {"genus": h, "strands": k, "connected": conn, "count": c}
                for (h, k, conn), c in sorted(table.cells.items())
            ],
        }
        print(json.dumps(payload, sort_keys=True))
    return 0


def _cmd_constants(config: RunConfig) -> int:
    rows = census.constants_report()
    if config.output == "csv":
        sys.stdout.write(census.constants_to_csv(rows))
    else:
        print(census.constants_to_json(rows))
    return 0


def _cmd_crosscheck(config: RunConfig) -> int:
    """Closed forms against the oracle, coefficient by coefficient."""
    vmax = config.vmax
    threads = config.threads
    checks = [
        ("free-energy", onematrix.free_energy_raw_series(vmax),
         oracle.free_energy_series(vmax, threads=threads)),
        ("two-point", onematrix.g2_raw_series(vmax),
         oracle.g2_series(vmax, threads=threads)),
        ("connected-four-point", onematrix.gamma_raw_series(vmax),
         oracle.gamma_series(vmax, threads=threads)),
    ]
    status = 0
    for name, closed, counted in checks:
        for p in range(vmax + 1):
            if closed[p] != counted[p]:
                print(f"MISMATCH {name} at g^{p}: closed form {closed[p]} "
                      f"!= oracle {counted[p]}")
                return 1
        print(f"ok {name}: coefficients agree through g^{vmax}")
    for V in range(1, vmax + 1):
        table = oracle.enumerate_pairings(V, threads=threads)
        expected = oracle.double_factorial(4 * V - 1)
        if table.total() != expected:
            print(f"MISMATCH pairing total at V={V}: {table.total()} != {expected}")
            return 1
    print(f"ok pairing totals: (4V-1)!! for V <= {vmax}")
    return status


def _cmd_asymptotics(config: RunConfig) -> int:
    builders = {
        "raw-links": census.raw_link_diagrams,
        "reduced-links": census.reduced_link_diagrams,
        "reduced-tangles": census.reduced_tangles,
        "flype-classes": census.flype_tangle_classes,
    }
    seq = builders[config.sequence](config.terms)
    est = census.ratio_asymptotics(seq)
    payload = {
        "sequence": seq.name,
        "terms": config.terms,
        "growth": est.growth,
        "exponent": est.exponent,
        "ratios": list(est.ratios),
        "diagnostics": list(est.diagnostics),
    }
    print(json.dumps(payload, sort_keys=True))
    return 0


_COMMANDS = {
    "series": _cmd_series,
    "enumerate": _cmd_enumerate,
    "constants": _cmd_constants,
    "crosscheck": _cmd_crosscheck,
    "asymptotics": _cmd_asymptotics,
}


def run(config: RunConfig) -> int:
    handler = _COMMANDS.get(config.command)
    if handler is None:
        print(f"unknown command {config.command!r}", file=sys.stderr)
        return 2
    return handler(config)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkcensus",
        description="Exact counting of alternating link/tangle diagrams and flype classes.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="worker count (default: LINKCENSUS_THREADS or hardware)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_series = sub.add_parser("series", help="print a generating function")
    p_series.add_argument("--model", choices=["raw", "reduced", "flype", "on", "two-color"],
                          default="reduced")
    p_series.add_argument("--what", choices=["links", "tangles"], default="links")
    p_series.add_argument("--n", type=Fraction, default=Fraction(1),
                          help="loop weight for --model on (a rational, e.g. 1/2)")
    p_series.add_argument("--reduced", action="store_true",
                          help="renormalized variant (two-color model)")
    p_series.add_argument("--order", type=int, default=8)
    p_series.add_argument("--format", dest="output", choices=["json", "csv"], default="json")

    p_enum = sub.add_parser("enumerate", help="dump an exact pairing count table")
    p_enum.add_argument("--vertices", type=int, required=True)
    p_enum.add_argument("--planar", action="store_true")
    p_enum.add_argument("--connected", action="store_true")
    p_enum.add_argument("--tangencies", type=int, default=0,
                        help="how many vertices use the tangency wiring")
    p_enum.add_argument("--format", dest="output", choices=["csv", "json"], default="csv")

    p_const = sub.add_parser("constants", help="print the constants table")
    p_const.add_argument("--format", dest="output", choices=["json", "csv"], default="json")

    p_cross = sub.add_parser("crosscheck", help="closed forms vs. the oracle")
    p_cross.add_argument("--vmax", type=int, default=4)

    p_asym = sub.add_parser("asymptotics", help="ratio-method growth estimate")
    p_asym.add_argument("--sequence", choices=["raw-links", "reduced-links",
                                               "reduced-tangles", "flype-classes"],
                        default="reduced-links")
    p_asym.add_argument("--terms", type=int, default=12)
    p_asym.add_argument("--format", dest="output", choices=["json"], default="json")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    fields = {f: getattr(args, f) for f in RunConfig.__dataclass_fields__
              if hasattr(args, f)}
    config = RunConfig(**fields)
    try:
        return run(config)
    except (ValueError, oracle.CeilingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
