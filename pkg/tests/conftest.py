"""Shared fixtures and hypothesis strategies."""

from __future__ import annotations

import os
from fractions import Fraction

from hypothesis import settings
from hypothesis import strategies as st

from tropprym.graph_core import MetricGraph
from tropprym.rank_oracle import RR_ENV

# Every rank computed during the tests also checks the Riemann-Roch identity.
os.environ[RR_ENV] = "1"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

LENGTHS = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]


@st.composite
def metric_graphs(draw: st.DrawFn, max_vertices: int = 4, max_extra: int = 3, weights: bool = False) -> MetricGraph:
    """Connected graphs: a random spanning tree plus extra edges, loops allowed."""
    n = draw(st.integers(1, max_vertices))
    names = [f"v{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        j = draw(st.integers(0, i - 1))
        edges.append((f"t{i}", names[j], names[i], draw(st.sampled_from(LENGTHS))))
    for k in range(draw(st.integers(0 if n > 1 else 1, max_extra))):
        a = draw(st.sampled_from(names))
        b = draw(st.sampled_from(names))
        edges.append((f"x{k}", a, b, draw(st.sampled_from(LENGTHS))))
    if weights:
        vertices = {v: draw(st.integers(0, 1)) for v in names}
    else:
        vertices = {v: 0 for v in names}
    return MetricGraph.build(vertices, edges)

# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter) -> None:  # noqa: ANN001
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
