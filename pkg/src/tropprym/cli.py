"""Command-line front end.

Every subcommand prints one JSON document on standard output, or CSV with
``--csv``. Exit codes: 0 on success, 1 on a domain error (malformed input,
infeasible parameters, a failed verification), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from random import Random
from typing import Any

from tropprym import __version__
from tropprym.covers import DoubleCover, cover_document_from_json
from tropprym.errors import ParseError, TropPrymError
from tropprym.fixtures import COVERS, fixture_directory, norm_trial_covers
from tropprym.graph_core import Divisor, MetricGraph, divisor_from_json, graph_from_json
from tropprym.lattice import lattice_report
from tropprym.rank_oracle import linearly_equivalent, rank, subdivide
from tropprym.tableaux import (
    Tableau,
    distinct_cells,
    enumerate_prym_tableaux,
    min_symbols_lower_triangular,
    pbn_count,
    pbn_dimension,
    search_branches,
)
from tropprym.verify import norm_div_trials, parity_trials

OK, DOMAIN_ERROR, USAGE_ERROR = 0, 1, 2


class UsageError(Exception):
    """Bad command-line arguments that argparse cannot detect, such as a missing file."""


def _read_json(path: str) -> Any:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None


def _load_cover(spec: str) -> DoubleCover:
    """A cover document from a path, or a shipped fixture by name."""
    if not Path(spec).is_file() and spec in COVERS:
        spec = str(fixture_directory() / f"{spec}.json")
    data = _read_json(spec)
    try:
        cover = cover_document_from_json(data)
    except ParseError as exc:
        raise ParseError(exc.message, f"{spec}: {exc.location}" if exc.location else spec) from None
    assert isinstance(cover, DoubleCover)
    return cover


def _load_graph(path: str) -> MetricGraph:
    data = _read_json(path)
    if isinstance(data, dict) and "source" in data and "vertices" not in data:
        data = data["source"]
    try:
        return graph_from_json(data)
    except ParseError as exc:
        raise ParseError(exc.message, f"{path}: {exc.location}" if exc.location else path) from None


def _load_divisor(path: str, graph: MetricGraph) -> Divisor:
    try:
        return divisor_from_json(_read_json(path), graph)
    except ParseError as exc:
        raise ParseError(exc.message, f"{path}: {exc.location}" if exc.location else path) from None


def _cmd_pbn_dim(args: argparse.Namespace) -> dict[str, Any]:
    dim = pbn_dimension(args.g, args.r, args.k)
    return {"dimension": dim, "empty": True} if dim is None else {"dimension": dim}


def _cmd_pbn_count(args: argparse.Namespace) -> dict[str, Any]:
    try:
        return {"count": pbn_count(args.g, args.r)}
    except ValueError as exc:
        raise TropPrymError(str(exc)) from None


def _branch(task: tuple[int, int, int, tuple[int, ...]]) -> list[list[list[int]]]:
    g, r, k, prefix = task
    return [t.to_lists() for t in enumerate_prym_tableaux(g, r, k, prefix=prefix)]


def _cmd_tableaux(args: argparse.Namespace) -> dict[str, Any]:
    g, r, k = args.g, args.r, args.k
    if args.jobs > 1:
        tasks = [(g, r, k, p) for p in search_branches(g, r, k)]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            parts = list(pool.map(_branch, tasks))
        tableaux = [Tableau(tuple(map(tuple, rows))) for part in parts for rows in part]
    else:
        tableaux = list(enumerate_prym_tableaux(g, r, k))
    cells = distinct_cells(tableaux, g, k)
    if args.limit is not None:
        cells = cells[: args.limit]
    return {"cells": [c.as_dict() for c in cells]}


def _cmd_min_symbols(args: argparse.Namespace) -> dict[str, Any]:
    return {"min_symbols": min_symbols_lower_triangular(args.r, args.k)}


def _cmd_lattice_report(args: argparse.Namespace) -> dict[str, Any]:
    return lattice_report(_load_cover(args.cover))


def _cmd_rank(args: argparse.Namespace) -> dict[str, Any]:
    graph = _load_graph(args.graph)
    d = _load_divisor(args.divisor, graph)
    dg, vec = subdivide(graph, d, args.scale)
    return {"rank": rank(dg, vec)}


def _cmd_equiv(args: argparse.Namespace) -> dict[str, Any]:
    graph = _load_graph(args.graph)
    d1 = _load_divisor(args.d1, graph)
    d2 = _load_divisor(args.d2, graph)
    # The subdivision must contain both supports, not only that of the difference.
    dg, _ = subdivide(graph, Divisor.of_points(d1.support + d2.support), args.scale)
    return {"equivalent": linearly_equivalent(dg, dg.divisor_vector(d1), dg.divisor_vector(d2))}


def _cmd_verify_norm(args: argparse.Namespace) -> dict[str, Any]:
    covers = norm_trial_covers()
    if args.cover:
        covers = [(args.cover, _load_cover(args.cover))]
    out = norm_div_trials(covers, args.count, Random(args.seed)).as_dict()
    out["covers"] = len(covers)
    return out


def _cmd_verify_parity(args: argparse.Namespace) -> dict[str, Any]:
    result = parity_trials(args.g, args.r, Random(args.seed), args.samples)
    out = result.as_dict()
    out["failed"] = result.failures
    return out


def _nonnegative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return n


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV output")
    common.add_argument(
        "--report",
        action="store_true",
        help="wrap the output with the command, inputs, elapsed time and version",
    )
    common.set_defaults(format="json")

    parser = argparse.ArgumentParser(
        prog="tropprym", description="Tropical Prym varieties and Prym-Brill-Noether loci."
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pbn-dim", parents=[common], help="dimension of the Prym-Brill-Noether locus")
    p.add_argument("g", type=_positive)
    p.add_argument("r", type=int)
    p.add_argument("k", type=_nonnegative, nargs="?", default=0)
    p.set_defaults(run=_cmd_pbn_dim)

    p = sub.add_parser("pbn-count", parents=[common], help="number of zero-dimensional cells")
    p.add_argument("g", type=_positive)
    p.add_argument("r", type=_nonnegative)
    p.set_defaults(run=_cmd_pbn_count)

    p = sub.add_parser("tableaux", parents=[common], help="list Prym cells")
    p.add_argument("g", type=_positive)
    p.add_argument("r", type=int)
    p.add_argument("k", type=_nonnegative, nargs="?", default=0)
    p.add_argument("--limit", type=_nonnegative, help="print at most this many cells")
    p.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    p.set_defaults(run=_cmd_tableaux)

    p = sub.add_parser("min-symbols", parents=[common], help="fewest symbols in a lower-triangular tableau")
    p.add_argument("r", type=_nonnegative)
    p.add_argument("k", type=_nonnegative)
    p.set_defaults(run=_cmd_min_symbols)

    p = sub.add_parser("lattice-report", parents=[common], help="Prym lattice of a double cover")
    p.add_argument("cover", help="cover document path, or the name of a shipped fixture")
    p.set_defaults(run=_cmd_lattice_report)

    p = sub.add_parser("rank", parents=[common], help="rank of a divisor")
    p.add_argument("graph")
    p.add_argument("divisor")
    p.add_argument("--scale", type=_positive, default=1, help="extra subdivision factor")
    p.set_defaults(run=_cmd_rank)

    p = sub.add_parser("equiv", parents=[common], help="linear equivalence of two divisors")
    p.add_argument("graph")
    p.add_argument("d1")
    p.add_argument("d2")
    p.add_argument("--scale", type=_positive, default=1, help="extra subdivision factor")
    p.set_defaults(run=_cmd_equiv)

    p = sub.add_parser("verify-norm", parents=[common], help="randomized norm and divisor commutation")
    p.add_argument("--cover", help="restrict to one cover document or fixture")
    p.add_argument("--count", type=_positive, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=_cmd_verify_norm)

    p = sub.add_parser("verify-parity", parents=[common], help="oracle rank parity on every Prym cell")
    p.add_argument("g", type=_positive)
    p.add_argument("r", type=_nonnegative)
    p.add_argument("--samples", type=_nonnegative, default=3, help="random samples per cell")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=_cmd_verify_parity)
    return parser


def _csv_rows(result: dict[str, Any]) -> list[list[Any]]:
    if "cells" in result:
        rows: list[list[Any]] = [["tableau", "dimension", "parity", "empty"]]
        for c in result["cells"]:
            rows.append([json.dumps(c["tableau"]), c["dimension"], c["parity"], c["empty"]])
        return rows
    flat = {
        k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in result.items()
    }
    return [list(flat), list(flat.values())]


def render(result: dict[str, Any], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(_csv_rows(result))
        return buf.getvalue()
    return json.dumps(result) + "\n"


def _inputs(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"run", "format", "report", "command"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _failed(result: dict[str, Any]) -> bool:
    return result.get("ok") is False


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE_ERROR
    start = time.perf_counter()
    try:
        result = args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except TropPrymError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_ERROR
    if args.report:
        result = {
            "command": args.command,
            "inputs": _inputs(args),
            "outputs": result,
            "elapsed": round(time.perf_counter() - start, 6),
            "version": __version__,
        }
    sys.stdout.write(render(result, args.format))
    failed = _failed(result["outputs"] if args.report else result)
    return DOMAIN_ERROR if failed else OK


if __name__ == "__main__":
    sys.exit(main())
