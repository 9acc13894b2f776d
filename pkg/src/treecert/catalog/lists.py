"""Search, counting, threshold and two-twos over lists in ``[ell]^n``."""

from __future__ import annotations

import itertools

from ..model import FunctionSpec, ProgramTree
from .entry import CatalogEntry, guess_not, require


def _all(n: int, ell: int):
    return itertools.product(range(ell), repeat=n)


def search(n: int, ell: int = 2, q: int = 1) -> CatalogEntry:
    """First index holding ``q`` (0 when absent); reads left to right, guessing "not q"."""
    require(n >= 1 and ell >= 2 and 0 <= q < ell, f"bad search parameters n={n} ell={ell} q={q}")

    def program():
        for j in range(1, n + 1):
            if (yield guess_not(j, q, ell)) == 1:
                return j
        return 0

    def f(x):
        return next((j for j, v in enumerate(x, 1) if v == q), 0)

    tree = ProgramTree(n, ell, program, name=f"search(n={n})")
    fn = FunctionSpec(n, ell, _all(n, ell), f, name="search")
    return CatalogEntry("search", {"n": n, "ell": ell, "q": q}, tree, fn,
                        bounds={"T": n, "G": 1}, check_output=lambda x, lab: lab == f(x))


def counting(n: int, ell: int = 3, q: int = 2, r: int = 2) -> CatalogEntry:
    """All indices holding ``q`` on inputs with at most ``r`` of them."""
    require(n >= 1 and ell >= 2 and 0 <= q < ell and 0 <= r <= n,
            f"bad counting parameters n={n} ell={ell} q={q} r={r}")

    def program():
        found = []
        for j in range(1, n + 1):
            if (yield guess_not(j, q, ell)) == 1:
                found.append(j)
        return tuple(found)

    def f(x):
        return tuple(j for j, v in enumerate(x, 1) if v == q)

    domain = [x for x in _all(n, ell) if x.count(q) <= r]
    tree = ProgramTree(n, ell, program, name=f"counting(n={n},r={r})")
    fn = FunctionSpec(n, ell, domain, f, name="counting")
    return CatalogEntry("counting", {"n": n, "ell": ell, "q": q, "r": r}, tree, fn,
                        bounds={"T": n, "G": r}, exact={"T": n, "G": r},
                        check_output=lambda x, lab: lab == f(x))


def threshold(n: int, k: int, ell: int = 2, q: int = 1) -> CatalogEntry:
    """Whether at most ``k`` entries equal ``q``; halts at the ``(k+1)``-th occurrence."""
    require(n >= 1 and ell >= 2 and 0 <= q < ell and 0 <= k < n,
            f"bad threshold parameters n={n} k={k} ell={ell} q={q}")

    def program():
        seen = 0
        for j in range(1, n + 1):
            if (yield guess_not(j, q, ell)) == 1:
                seen += 1
                if seen > k:
                    return False
        return True

    def f(x):
        return x.count(q) <= k

    tree = ProgramTree(n, ell, program, name=f"threshold(n={n},k={k})")
    fn = FunctionSpec(n, ell, _all(n, ell), f, name="threshold")
    return CatalogEntry("threshold", {"n": n, "k": k, "ell": ell, "q": q}, tree, fn,
                        bounds={"T": n, "G": k + 1}, check_output=lambda x, lab: lab == f(x))


def two_twos(n: int) -> CatalogEntry:
    """Whether ``x`` in ``[3]^n`` has at least two entries equal to 2."""
    require(n >= 2, f"two_twos needs n >= 2, got {n}")

    def program():
        seen = 0
        for j in range(1, n + 1):
            if (yield guess_not(j, 2, 3)) == 1:
                seen += 1
                if seen == 2:
                    return "yes"
        return "no"

    def f(x):
        return "yes" if x.count(2) >= 2 else "no"

    tree = ProgramTree(n, 3, program, name=f"two_twos(n={n})")
    fn = FunctionSpec(n, 3, _all(n, 3), f, m=2, name="two_twos")
    return CatalogEntry("two_twos", {"n": n}, tree, fn, bounds={"T": n, "G": 2},
                        exact={"T": n, "G": 2}, check_output=lambda x, lab: lab == f(x))


def list_problem(kind: str, **params) -> CatalogEntry:
    builders = {"search": search, "counting": counting, "threshold": threshold, "two_twos": two_twos}
    require(kind in builders, f"unknown list problem {kind!r}")
    return builders[kind](**params)
