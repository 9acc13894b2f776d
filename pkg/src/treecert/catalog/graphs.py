"""Simple graphs, their two oracle encodings, enumerators and reductions."""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import lru_cache


class EncodingError(ValueError):
    """An input string is not a valid graph encoding."""


@dataclass(frozen=True)
class GraphInstance:
    """Simple graph on vertices ``0..n-1``; undirected edges are stored as ``(u, v)`` with ``u < v``."""

    n: int
    edges: frozenset[tuple[int, int]]
    directed: bool = False

    @classmethod
    def of(cls, n: int, edges: Iterable[tuple[int, int]], directed: bool = False) -> "GraphInstance":
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}; only simple graphs are supported")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {(u, v)} outside 0..{n - 1}")
            norm.add((u, v) if directed else (min(u, v), max(u, v)))
        return cls(n, frozenset(norm), directed)

    def has_edge(self, u: int, v: int) -> bool:
        if self.directed:
            return (u, v) in self.edges
        return (min(u, v), max(u, v)) in self.edges

    def neighbors(self, v: int) -> list[int]:
        return [w for w in range(self.n) if w != v and self.has_edge(v, w)]

    @property
    def m(self) -> int:
        return len(self.edges)

    def reverse(self) -> "GraphInstance":
        if not self.directed:
            return self
        return GraphInstance(self.n, frozenset((v, u) for u, v in self.edges), True)

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"GraphInstance(n={self.n}, {kind}, edges={sorted(self.edges)})"


# ---------------------------------------------------------------- adjacency matrix

@lru_cache(maxsize=None)
def matrix_pairs(n: int, directed: bool) -> tuple[tuple[int, int], ...]:
    """Coordinate layout: pairs in lexicographic order, coordinate ``j`` is ``pairs[j-1]``."""
    if directed:
        return tuple((u, v) for u in range(n) for v in range(n) if u != v)
    return tuple((u, v) for u in range(n) for v in range(u + 1, n))


@lru_cache(maxsize=None)
def matrix_index(n: int, directed: bool) -> dict[tuple[int, int], int]:
    return {p: j + 1 for j, p in enumerate(matrix_pairs(n, directed))}


def encode_matrix(g: GraphInstance) -> tuple[int, ...]:
    return tuple(int(p in g.edges) for p in matrix_pairs(g.n, g.directed))


def decode_matrix(x: Sequence[int], n: int, directed: bool = False) -> GraphInstance:
    pairs = matrix_pairs(n, directed)
    if len(x) != len(pairs) or any(b not in (0, 1) for b in x):
        raise EncodingError(f"not an adjacency-matrix string for n={n}: {tuple(x)}")
    return GraphInstance(n, frozenset(p for p, b in zip(pairs, x) if b), directed)


# ---------------------------------------------------------------- adjacency list

def list_index(n: int, v: int, i: int) -> int:
    """Coordinate of the ``i``-th (1-based) entry of ``v``'s list."""
    return v * (n - 1) + i


def encode_list(g: GraphInstance, orders: Sequence[Sequence[int]] | None = None) -> tuple[int, ...]:
    """Row ``v`` lists the neighbors of ``v`` (sorted unless ``orders`` is given), then nil = ``n``."""
    n = g.n
    x = []
    for v in range(n):
        row = list(orders[v]) if orders is not None else g.neighbors(v)
        if sorted(row) != g.neighbors(v):
            raise ValueError(f"row order for {v} is not a permutation of its neighbors")
        x.extend(row + [n] * (n - 1 - len(row)))
    return tuple(x)


def decode_list(x: Sequence[int], n: int, directed: bool = False) -> GraphInstance:
    """Parse and check an adjacency-list string."""
    if len(x) != n * (n - 1):
        raise EncodingError(f"expected {n * (n - 1)} entries, got {len(x)}")
    nil = n
    edges = set()
    for v in range(n):
        row = list(x[v * (n - 1):(v + 1) * (n - 1)])
        if any(not 0 <= a <= nil for a in row):
            raise EncodingError(f"row {v} has a symbol outside 0..{nil}")
        k = row.index(nil) if nil in row else len(row)
        if any(a != nil for a in row[k:]):
            raise EncodingError(f"row {v} has a neighbor after nil")
        nbrs = row[:k]
        if v in nbrs or len(set(nbrs)) != len(nbrs):
            raise EncodingError(f"row {v} lists a self-loop or a repeated neighbor")
        edges.update((v, w) for w in nbrs)
    if not directed:
        if any((w, v) not in edges for v, w in edges):
            raise EncodingError("undirected lists are not mutually consistent")
        edges = {(u, v) for u, v in edges if u < v}
    return GraphInstance(n, frozenset(edges), directed)


def is_canonical_list(x: Sequence[int], n: int) -> bool:
    for v in range(n):
        row = [a for a in x[v * (n - 1):(v + 1) * (n - 1)] if a != n]
        if row != sorted(row):
            return False
    return True


# ---------------------------------------------------------------- enumeration

def all_graphs(n: int, directed: bool = False) -> Iterator[GraphInstance]:
    pairs = matrix_pairs(n, directed)
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        yield GraphInstance(n, frozenset(p for p, b in zip(pairs, bits) if b), directed)


def is_acyclic(g: GraphInstance) -> bool:
    indeg = [0] * g.n
    for _, v in g.edges:
        indeg[v] += 1
    ready = [v for v in range(g.n) if indeg[v] == 0]
    seen = 0
    while ready:
        u = ready.pop()
        seen += 1
        for v in g.neighbors(u):
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    return seen == g.n


def all_dags(n: int) -> Iterator[GraphInstance]:
    return (g for g in all_graphs(n, directed=True) if is_acyclic(g))


def all_bipartite(a: int, b: int) -> Iterator[GraphInstance]:
    """Every graph with parts ``0..a-1`` and ``a..a+b-1`` and edges only across."""
    pairs = [(x, a + y) for x in range(a) for y in range(b)]
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        yield GraphInstance(a + b, frozenset(p for p, bit in zip(pairs, bits) if bit))


def all_list_orderings(g: GraphInstance) -> Iterator[tuple[int, ...]]:
    """Every adjacency-list encoding of ``g`` (one per choice of row orders)."""
    rows = [list(itertools.permutations(g.neighbors(v))) for v in range(g.n)]
    for choice in itertools.product(*rows):
        yield encode_list(g, choice)


def random_graph(n: int, p: float, rng: random.Random, directed: bool = False) -> GraphInstance:
    return GraphInstance(n, frozenset(e for e in matrix_pairs(n, directed) if rng.random() < p), directed)


def random_bipartite_graph(n: int, p: float, rng: random.Random) -> GraphInstance:
    side = [rng.random() < 0.5 for _ in range(n)]
    return GraphInstance(n, frozenset((u, v) for u, v in matrix_pairs(n, False)
                                      if side[u] != side[v] and rng.random() < p))


# ---------------------------------------------------------------- reductions

def reverse_graph(g: GraphInstance) -> GraphInstance:
    return g.reverse()


def cycle_reduction(g: GraphInstance, s: int, t: int) -> GraphInstance:
    """Directed graph on ``n + 1`` vertices: ``g`` plus ``(w, s)`` and ``(t, w)`` with ``w = n``."""
    if not g.directed:
        raise ValueError("the cycle reduction takes a directed graph")
    w = g.n
    return GraphInstance(g.n + 1, g.edges | {(w, s), (t, w)}, True)


@dataclass(frozen=True)
class CycleDraw:
    """Random vertex labels in ``[k]`` and a random orientation of every vertex pair."""

    k: int
    C: tuple[int, ...]
    D: frozenset[tuple[int, int]]

    @classmethod
    def draw(cls, n: int, k: int, rng: random.Random) -> "CycleDraw":
        C = tuple(rng.randrange(k) for _ in range(n))
        D = frozenset((u, v) if rng.random() < 0.5 else (v, u) for u, v in matrix_pairs(n, False))
        return cls(k, C, D)

    def allows(self, u: int, w: int) -> bool:
        """Whether an edge ``{u, w}`` of the base graph becomes the arc ``u -> w``."""
        return (u, w) in self.D and self.C[u] == (self.C[w] + 1) % self.k


def k_cycle_subgraph(g: GraphInstance, draw: CycleDraw) -> GraphInstance:
    """Directed graph keeping arc ``u -> w`` iff ``{u, w}`` is an edge and the draw allows it."""
    if g.directed:
        raise ValueError("the k-cycle reduction takes an undirected graph")
    arcs = {(u, w) for a, b in g.edges for u, w in ((a, b), (b, a)) if draw.allows(u, w)}
    return GraphInstance(g.n, frozenset(arcs), True)


def reduction_graphs(kind: str, instance: GraphInstance, params: dict | None = None,
                     seed: int = 0) -> GraphInstance:
    """``reverse_graph``, ``cycle_reduction_H`` (params s, t) or ``k_cycle_subgraph_H`` (param k)."""
    params = params or {}
    if kind == "reverse_graph":
        return reverse_graph(instance)
    if kind == "cycle_reduction_H":
        return cycle_reduction(instance, params["s"], params["t"])
    if kind == "k_cycle_subgraph_H":
        draw = CycleDraw.draw(instance.n, params["k"], random.Random(seed))
        return k_cycle_subgraph(instance, draw)
    raise ValueError(f"unknown reduction {kind!r}")
