"""Name-based access to every catalog problem."""

from __future__ import annotations

from collections.abc import Callable

from . import adjlist, lists, matrix, order
from .entry import CatalogEntry, ParamError


def _matrix(kind: str) -> Callable[..., CatalogEntry]:
    return lambda **p: matrix.adjmatrix_problem(kind, **p)


def _adjlist(kind: str) -> Callable[..., CatalogEntry]:
    return lambda **p: adjlist.adjlist_problem(kind, **p)


REGISTRY: dict[str, Callable[..., CatalogEntry]] = {
    "search": lists.search,
    "counting": lists.counting,
    "threshold": lists.threshold,
    "two_twos": lists.two_twos,
    "min": lambda **p: order.order_statistic("min", **p),
    "k_min": lambda **p: order.order_statistic("k_min", **p),
    **{f"matrix.{k}": _matrix(k) for k in matrix.KINDS},
    **{f"list.{k}": _adjlist(k) for k in adjlist.KINDS},
}


def problem_names() -> list[str]:
    return sorted(REGISTRY)


def get_entry(name: str, **params) -> CatalogEntry:
    """Build a catalog entry, e.g. ``get_entry("two_twos", n=5)``."""
    try:
        builder = REGISTRY[name]
    except KeyError:
        raise ParamError(f"unknown problem {name!r}; known: {', '.join(problem_names())}") from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise ParamError(f"bad parameters for {name}: {exc}") from None
