"""Tropical Prym varieties of double covers of metric graphs and Prym-Brill-Noether loci of folded chains of loops."""

from tropprym.chains import ChainSpec, FoldedChain
from tropprym.covers import DoubleCover, EdgeImage, HarmonicMorphism
from tropprym.graph_core import Divisor, MetricGraph, PLFunction, Point
from tropprym.lattice import lattice_report, prym_lattice
from tropprym.tableaux import Tableau, pbn_count, pbn_dimension

__version__ = "0.1.0"

__all__ = [
    "ChainSpec",
    "Divisor",
    "DoubleCover",
    "EdgeImage",
    "FoldedChain",
    "HarmonicMorphism",
    "MetricGraph",
    "PLFunction",
    "Point",
    "Tableau",
    "__version__",
    "lattice_report",
    "pbn_count",
    "pbn_dimension",
    "prym_lattice",
]
