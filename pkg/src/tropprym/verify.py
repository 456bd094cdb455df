"""Randomized consistency checks shared by the command line and the test suite."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from random import Random
from typing import Any

from tropprym.chains import FoldedChain
from tropprym.covers import HarmonicMorphism, norm_function, pushforward
from tropprym.graph_core import (
    Divisor,
    MetricGraph,
    genus,
    principal_divisor,
    random_divisor,
    random_function,
)
from tropprym.rank_oracle import linearly_equivalent, rank, subdivide
from tropprym.tableaux import parity_name, prym_cells


@dataclass
class TrialSummary:
    """Outcome of a batch of randomized checks.

    Attributes:
        checked: Number of trials run.
        failures: Descriptions of the trials that failed.
    """

    checked: int = 0
    failures: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict[str, Any]:
        return {"checked": self.checked, "failures": len(self.failures), "ok": self.ok}


def norm_commutes(m: HarmonicMorphism, f: Any) -> bool:
    """Whether the divisor of the norm of ``f`` is the pushforward of the divisor of ``f``."""
    return principal_divisor(norm_function(m, f)) == pushforward(m, principal_divisor(f))


def norm_div_trials(
    covers: Sequence[tuple[str, HarmonicMorphism]], count: int, rng: Random
) -> TrialSummary:
    """Check norm and divisor commutation on ``count`` random functions, cycling through covers."""
    out = TrialSummary()
    for n in range(count):
        name, m = covers[n % len(covers)]
        f = random_function(m.source, rng)
        out.checked += 1
        if not norm_commutes(m, f):
            out.failures.append({"cover": name, "trial": n})
    return out


def grid_denominator(graph: MetricGraph) -> int:
    """Finest grid that keeps the subdivision small: integers when all lengths are integral."""
    return 1 if all(e.length.denominator == 1 for e in graph.edges) else 4


def oracle_trials(
    graphs: Sequence[tuple[str, MetricGraph]], count: int, rng: Random
) -> TrialSummary:
    """Riemann-Roch and invariance of rank under adding a random principal divisor.

    Degrees are drawn within two of ``g - 1`` so that both ``D`` and ``K - D``
    have small rank and the exhaustive rank search stays fast.
    """
    out = TrialSummary()
    for n in range(count):
        name, graph = graphs[n % len(graphs)]
        g = genus(graph)
        den = grid_denominator(graph)
        deg = rng.randint(max(-1, g - 3), min(2 * g - 1, g + 1))
        negatives = max(rng.randint(0, 1), -deg)
        d = random_divisor(graph, rng, deg, negatives=negatives, denominator=den)
        e = d + principal_divisor(random_function(graph, rng, denominator=den))
        dg, _ = subdivide(graph, Divisor.of_points(d.support + e.support))
        dv, ev = dg.divisor_vector(d), dg.divisor_vector(e)
        r_d = rank(dg, dv)
        r_dual = rank(dg, [k - x for k, x in zip(dg.canonical(), dv)])
        r_e = rank(dg, ev)
        out.checked += 1
        problems = []
        if r_d - r_dual != deg - g + 1:
            problems.append("riemann-roch")
        if r_d != r_e:
            problems.append("invariance")
        if not linearly_equivalent(dg, dv, ev):
            problems.append("equivalence")
        if problems:
            out.failures.append({"graph": name, "trial": n, "problems": problems})
    return out


def parity_trials(g: int, r: int, rng: Random, random_samples: int = 3) -> TrialSummary:
    """Oracle rank modulo 2 against the parity of every Prym cell of a concrete folded chain.

    Each cell is tested at its pinned sample and at ``random_samples`` random
    placements of its free pairs; cells that leave the middle loop unpinned
    are tested for both parities.
    """
    fc = FoldedChain.concrete(g)
    graph = fc.source_graph()
    out = TrialSummary()
    for cell in prym_cells(g, r):
        for eps in [cell.parity] if cell.parity is not None else [0, 1]:
            samples = [fc.cell_sample(cell.tableau, eps)]
            samples += [fc.random_sample(cell.tableau, rng, eps) for _ in range(random_samples)]
            for x in samples:
                dg, vec = subdivide(graph, fc.prym_divisor(x))
                value = rank(dg, vec)
                out.checked += 1
                if value % 2 != eps:
                    out.failures.append(
                        {
                            "tableau": cell.tableau.to_lists(),
                            "parity": parity_name(eps),
                            "rank": value,
                        }
                    )
    return out


def unweighted_graphs(covers: Iterable[tuple[str, HarmonicMorphism]]) -> list[tuple[str, MetricGraph]]:
    """Source and target of each cover, skipping graphs with weighted vertices."""
    out = []
    for name, m in covers:
        for side, graph in (("source", m.source), ("target", m.target)):
            if not any(v.weight for v in graph.vertices):
                out.append((f"{name}.{side}", graph))
    return out
