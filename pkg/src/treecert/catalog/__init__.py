"""Worked problems as colored trees and randomized families."""

from .adjlist import adjlist_problem
from .entry import CatalogEntry, ParamError
from .graphs import (
    CycleDraw,
    EncodingError,
    GraphInstance,
    cycle_reduction,
    k_cycle_subgraph,
    reduction_graphs,
    reverse_graph,
)
from .lists import counting, list_problem, search, threshold, two_twos
from .matrix import adjmatrix_problem
from .order import order_statistic
from .registry import get_entry, problem_names

__all__ = [
    "CatalogEntry",
    "CycleDraw",
    "EncodingError",
    "GraphInstance",
    "ParamError",
    "adjlist_problem",
    "adjmatrix_problem",
    "counting",
    "cycle_reduction",
    "get_entry",
    "k_cycle_subgraph",
    "list_problem",
    "order_statistic",
    "problem_names",
    "reduction_graphs",
    "reverse_graph",
    "search",
    "threshold",
    "two_twos",
]
