"""Minimum and k-minimum finding by reading the list in a random order."""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from ..metrics import harmonic
from ..model import FunctionSpec, ProgramTree, Query, RandomizedTreeFamily
from .entry import CatalogEntry, require, split_query

MEMBER_CAP = 40_320
INPUT_CAP = 5_000


def precedes(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """``(value, index)`` order: smaller value first, ties broken by smaller index."""
    return a < b


def argmin_index(x) -> int:
    return min(range(len(x)), key=lambda i: (x[i], i)) + 1


def k_smallest(x, k: int) -> tuple[int, ...]:
    return tuple(sorted(sorted(range(1, len(x) + 1), key=lambda j: (x[j - 1], j))[:k]))


def _all_red(j: int, ell: int) -> tuple[Query, list]:
    return split_query(j, set(), ell)


def _not_smaller(j: int, worst: tuple[int, int], ell: int) -> set[int]:
    """Symbols ``q`` with ``(q, j)`` not preceding ``worst``."""
    return {q for q in range(ell) if not precedes((q, j), worst)}


def k_min_program(order: tuple[int, ...], ell: int, k: int):
    def program():
        kept: list[tuple[int, int]] = []
        for j in order:
            if len(kept) < k:
                q, blocks = _all_red(j, ell)
                b = yield q
                kept.append((blocks[b][0], j))
                continue
            worst = max(kept)
            black = _not_smaller(j, worst, ell)
            q, blocks = split_query(j, black, ell)
            b = yield q
            if black and b == 0:
                continue
            kept.remove(worst)
            kept.append((blocks[b][0], j))
        return tuple(sorted(i for _, i in kept))
    return program


def min_program(order: tuple[int, ...], ell: int):
    inner = k_min_program(order, ell, 1)

    def program():
        result = yield from inner()
        return result[0]
    return program


def _members(n: int, samples: int | None, seed: int):
    if samples is None:
        require(math.factorial(n) <= MEMBER_CAP,
                f"{n}! members exceed the cap {MEMBER_CAP}; pass samples and a seed")
        return list(itertools.permutations(range(1, n + 1)))
    rng = random.Random(seed)
    perms = []
    for _ in range(samples):
        p = list(range(1, n + 1))
        rng.shuffle(p)
        perms.append(tuple(p))
    return perms


def _domain(n: int, ell: int, inputs: int | None, seed: int):
    if inputs is None:
        require(ell ** n <= INPUT_CAP, f"{ell}^{n} inputs exceed the cap {INPUT_CAP}; pass inputs")
        return list(itertools.product(range(ell), repeat=n))
    rng = random.Random(seed + 1)
    dom = {tuple(sorted((rng.randrange(ell) for _ in range(n)), reverse=True))}
    dom.add(tuple(min(ell - 1, n - 1 - i) for i in range(n)))
    while len(dom) < inputs:
        dom.add(tuple(rng.randrange(ell) for _ in range(n)))
    return sorted(dom)


def order_statistic(kind: str, n: int, ell: int | None = None, k: int = 1,
                    samples: int | None = None, seed: int = 0,
                    inputs: int | None = None) -> CatalogEntry:
    """Randomized family over query orders for ``min`` or ``k_min``.

    With ``samples=None`` every permutation is a member; otherwise ``samples``
    permutations are drawn with the seed.  ``inputs`` switches the domain from
    all of ``[ell]^n`` to a seeded sample that always contains a decreasing list.
    """
    ell = n if ell is None else ell
    require(kind in ("min", "k_min"), f"unknown order statistic {kind!r}")
    require(n >= 1 and ell >= 1, "n and ell must be positive")
    if kind == "min":
        k = 1
    require(1 <= k <= n if kind == "min" else 1 <= k < n, f"bad k={k} for n={n}")
    perms = _members(n, samples, seed)
    if kind == "min":
        members = [(p, ProgramTree(n, ell, min_program(p, ell), name=f"min{p}")) for p in perms]
        f = argmin_index
        expected_G = harmonic(n)
    else:
        members = [(p, ProgramTree(n, ell, k_min_program(p, ell, k), name=f"kmin{p}"))
                   for p in perms]
        f = lambda x: k_smallest(x, k)  # noqa: E731
        expected_G = Fraction(k) + sum((Fraction(k, t) for t in range(k + 1, n + 1)), Fraction(0))
    family = RandomizedTreeFamily(members, name=f"{kind}(n={n})")
    fn = FunctionSpec(n, ell, _domain(n, ell, inputs, seed), f, name=kind)
    exact = {"T": n}
    if samples is None:
        exact["G"] = expected_G
    return CatalogEntry(kind, {"n": n, "ell": ell, "k": k, "samples": samples, "seed": seed},
                        family, fn, bounds={"T": n, "G_max": n}, exact=exact,
                        check_output=lambda x, lab: lab == f(x))
