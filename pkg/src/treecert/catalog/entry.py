from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from ..model import BLACK, RED, FunctionSpec, Query, RandomizedTreeFamily, TreeProgram


@dataclass
class CatalogEntry:
    """A worked problem: its tree (or randomized family), function and registered metrics.

    ``bounds`` maps a metric name to an upper bound; ``exact`` maps a metric
    name to its exact value.  ``check_output`` is an independent brute-force
    check of a leaf label on an input, when the problem has one.
    """

    name: str
    params: dict
    model: TreeProgram | RandomizedTreeFamily
    fn: FunctionSpec
    bounds: dict[str, float | Fraction] = field(default_factory=dict)
    exact: dict[str, float | Fraction] = field(default_factory=dict)
    check_output: Callable | None = None

    @property
    def randomized(self) -> bool:
        return isinstance(self.model, RandomizedTreeFamily)

    @property
    def tree(self) -> TreeProgram:
        if self.randomized:
            raise TypeError(f"{self.name} is a randomized family")
        return self.model

    @property
    def family(self) -> RandomizedTreeFamily:
        if self.randomized:
            return self.model
        return RandomizedTreeFamily([(0, self.model)], name=self.name)


class ParamError(ValueError):
    """Invalid catalog parameters."""


def require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParamError(msg)


BIT_COLORS = (BLACK, RED)


def bit_query(j: int) -> Query:
    """Binary query guessing 0: ``{0}`` black, ``{1}`` red; block index equals the bit."""
    return Query.of(j, [[0], [1]], BIT_COLORS, 2)


def guess_not(j: int, q: int, ell: int) -> Query:
    """Blocks ``[ell] - {q}`` (black, index 0) and ``{q}`` (red, index 1)."""
    return Query.of(j, [[a for a in range(ell) if a != q], [q]], BIT_COLORS, ell)


def split_query(j: int, black: set[int], ell: int, red_groups=()) -> tuple[Query, list]:
    """Black block ``black`` (if nonempty), listed red groups, then red singletons for the rest.

    Returns the query and the list of blocks in block-index order.
    """
    blocks: list[list[int]] = []
    colors: list[str] = []
    if black:
        blocks.append(sorted(black))
        colors.append(BLACK)
    used = set(black)
    for grp in red_groups:
        if grp:
            blocks.append(sorted(grp))
            colors.append(RED)
            used |= set(grp)
    for a in range(ell):
        if a not in used:
            blocks.append([a])
            colors.append(RED)
    return Query.of(j, blocks, colors, ell), blocks
