"""Named example covers and divisors, also shipped as JSON documents.

Every builder returns freshly validated objects. :func:`write_fixture_files`
regenerates the JSON copies in the ``fixtures`` directory next to this module,
and :func:`load_fixture` reads them back.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from tropprym.chains import FoldedChain
from tropprym.covers import (
    DoubleCover,
    EdgeImage,
    HarmonicMorphism,
    cover_document_from_json,
    cover_document_to_json,
    voltage_cover,
)
from tropprym.graph_core import (
    Divisor,
    MetricGraph,
    divisor_from_json,
    divisor_to_json,
    graph_to_json,
)


def smiley_cover() -> DoubleCover:
    """Two loops joined by two parallel edges, folding onto two loops joined by a bridge.

    Each loop of length 1 wraps with dilation 2 around a loop of length 2, and
    the parallel edges both map onto the bridge.
    """
    source = MetricGraph.build(
        ["a", "b"],
        [("l1", "a", "a", 1), ("l2", "b", "b", 1), ("p", "a", "b", 1), ("q", "a", "b", 1)],
    )
    target = MetricGraph.build(
        ["u", "v"], [("e1", "u", "u", 2), ("e2", "v", "v", 2), ("br", "u", "v", 1)]
    )
    return DoubleCover(
        source,
        target,
        {"a": "u", "b": "v"},
        {"l1": EdgeImage("e1", 2), "l2": EdgeImage("e2", 2), "p": "br", "q": "br"},
    )


def dilated_bouquet_cover() -> DoubleCover:
    """A weight-1 vertex with two loops of length 1 over a bouquet of two loops of length 2."""
    source = MetricGraph.build({"x": 1}, [("l1", "x", "x", 1), ("l2", "x", "x", 1)])
    target = MetricGraph.build({"y": 0}, [("e1", "y", "y", 2), ("e2", "y", "y", 2)])
    return DoubleCover(
        source, target, {"x": "y"}, {"l1": EdgeImage("e1", 2), "l2": EdgeImage("e2", 2)}
    )


def weighted_stem_cover() -> DoubleCover:
    """A weight-1 vertex joined to two loops, over a weight-1 vertex joined to one loop."""
    source = MetricGraph.build(
        {"p": 1, "u1": 0, "u2": 0},
        [("b1", "p", "u1", 1), ("b2", "p", "u2", 1), ("l1", "u1", "u1", 1), ("l2", "u2", "u2", 1)],
    )
    target = MetricGraph.build({"p": 1, "u": 0}, [("b", "p", "u", 1), ("l", "u", "u", 1)])
    return DoubleCover(
        source,
        target,
        {"p": "p", "u1": "u", "u2": "u"},
        {"b1": "b", "b2": "b", "l1": "l", "l2": "l"},
    )


def rank_jump_cover() -> DoubleCover:
    """Two circles joined at their tops and bottoms, over two loops joined by a bridge.

    Each circle consists of two arcs of length 1 and covers a loop of length 1
    twice; the two connecting edges map to the bridge.
    """
    source = MetricGraph.build(
        ["t1", "b1", "t2", "b2"],
        [
            ("L1", "t1", "b1", 1),
            ("R1", "b1", "t1", 1),
            ("hT", "t1", "t2", 1),
            ("hB", "b1", "b2", 1),
            ("L2", "t2", "b2", 1),
            ("R2", "b2", "t2", 1),
        ],
    )
    target = MetricGraph.build(
        ["a", "c"], [("e1", "a", "a", 1), ("br", "a", "c", 1), ("e2", "c", "c", 1)]
    )
    return DoubleCover(
        source,
        target,
        {"t1": "a", "b1": "a", "t2": "c", "b2": "c"},
        {"L1": "e1", "R1": "e1", "L2": "e2", "R2": "e2", "hT": "br", "hB": "br"},
    )


def rank_jump_divisor(n: int | None) -> Divisor:
    """Chips at distance ``1/n`` past the top and past the bottom of the first circle.

    ``None`` gives the limit ``t1 + b1``.
    """
    g = rank_jump_cover().source
    if n is None:
        return Divisor.from_vertices({"t1": 1, "b1": 1})
    return Divisor.of_points([g.point("L1", Fraction(1, n)), g.point("R1", Fraction(1, n))])


def folded_chain_cover(g: int) -> DoubleCover:
    return FoldedChain.concrete(g).cover()


def twisted_theta_cover() -> DoubleCover:
    """Free double cover of a theta graph with unequal edges, crossing sheets along one edge."""
    theta = MetricGraph.build(
        ["x", "y"], [("a", "x", "y", 1), ("b", "x", "y", 2), ("c", "y", "x", Fraction(3, 2))]
    )
    return voltage_cover(theta, ["a"])


COVERS: dict[str, Callable[[], DoubleCover]] = {
    "smiley": smiley_cover,
    "dilated_bouquet": dilated_bouquet_cover,
    "weighted_stem": weighted_stem_cover,
    "rank_jump": rank_jump_cover,
    "folded_chain_2": lambda: folded_chain_cover(2),
    "folded_chain_3": lambda: folded_chain_cover(3),
    "folded_chain_4": lambda: folded_chain_cover(4),
}

RANK_JUMP_DIVISORS = {"D2": 2, "D3": 3, "D4": 4, "D": None}


def norm_trial_covers() -> list[tuple[str, HarmonicMorphism]]:
    """Every named cover plus a free cover of a theta graph."""
    out: list[tuple[str, HarmonicMorphism]] = [(name, build()) for name, build in COVERS.items()]
    out.append(("twisted_theta", twisted_theta_cover()))
    return out


def fixture_directory() -> Path:
    return Path(str(resources.files("tropprym") / "fixtures"))


def fixture_document(name: str) -> dict[str, Any]:
    doc = cover_document_to_json(COVERS[name]())
    if name == "rank_jump":
        doc["divisors"] = {
            key: divisor_to_json(rank_jump_divisor(n)) for key, n in RANK_JUMP_DIVISORS.items()
        }
    return doc


def write_fixture_files(directory: Path | None = None) -> list[Path]:
    directory = directory or fixture_directory()
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    files: dict[str, Any] = {name: fixture_document(name) for name in COVERS}
    # Standalone graph and divisor files for the rank and equivalence commands.
    files["rank_jump_source"] = graph_to_json(rank_jump_cover().source)
    for key, n in RANK_JUMP_DIVISORS.items():
        files[f"rank_jump_{key}"] = divisor_to_json(rank_jump_divisor(n))
    for name, data in files.items():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(data, indent=2) + "\n")
        paths.append(path)
    return paths


def load_fixture(name: str) -> DoubleCover:
    """Read a shipped JSON fixture back into a validated cover."""
    data = json.loads((fixture_directory() / f"{name}.json").read_text())
    cover = cover_document_from_json(data)
    assert isinstance(cover, DoubleCover)
    return cover


def load_fixture_divisors(name: str) -> dict[str, Divisor]:
    data = json.loads((fixture_directory() / f"{name}.json").read_text())
    cover = cover_document_from_json(data)
    return {k: divisor_from_json(v, cover.source) for k, v in data.get("divisors", {}).items()}
