"""Plain classical implementations and brute-force checks used as oracles."""

from __future__ import annotations

import itertools
from collections import deque

from .graphs import GraphInstance


def canonical_partition(groups) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(g)) for g in groups))


# ---------------------------------------------------------------- classical runs

def bfs_forest(g: GraphInstance, roots=None, stop_at: int | None = None) -> list[int]:
    """Parent array of the BFS forest; vertices are scanned in ascending order."""
    n = g.n
    parent = [-1] * n
    unseen = set(range(n))
    for root in (range(n) if roots is None else roots):
        if root not in unseen:
            continue
        unseen.discard(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in range(n):
                if v in unseen and g.has_edge(u, v):
                    parent[v] = u
                    unseen.discard(v)
                    queue.append(v)
                    if v == stop_at:
                        return parent
    return parent


def path_from_parents(parent: list[int], s: int, t: int) -> tuple[int, ...] | None:
    if s == t:
        return (s,)
    path = [t]
    while path[-1] != s:
        p = parent[path[-1]]
        if p == -1:
            return None
        path.append(p)
    return tuple(reversed(path))


def bfs_shortest_path(g: GraphInstance, s: int, t: int) -> tuple[int, ...] | None:
    return path_from_parents(bfs_forest(g, roots=[s], stop_at=t), s, t)


def dfs_finish_order(g: GraphInstance, order=None) -> tuple[list[int], list[list[int]]]:
    """Finishing order and DFS trees, scanning candidate neighbors in ascending order."""
    n = g.n
    unseen = set(range(n))
    finish: list[int] = []
    trees: list[list[int]] = []

    def visit(s, comp):
        unseen.discard(s)
        comp.append(s)
        for v in range(n):
            if v in unseen and g.has_edge(s, v):
                visit(v, comp)
        finish.append(s)

    for v in (range(n) if order is None else order):
        if v in unseen:
            comp: list[int] = []
            visit(v, comp)
            trees.append(comp)
    return finish, trees


def dfs_topological_order(g: GraphInstance) -> tuple[int, ...]:
    finish, _ = dfs_finish_order(g)
    return tuple(reversed(finish))


def list_dfs_topological_order(g: GraphInstance, rows) -> tuple[int, ...]:
    """Reverse finishing order of DFS that follows each adjacency row in its listed order."""
    seen: set[int] = set()
    finish: list[int] = []

    def visit(s):
        seen.add(s)
        for v in rows[s]:
            if v not in seen:
                visit(v)
        finish.append(s)

    for v in range(g.n):
        if v not in seen:
            visit(v)
    return tuple(reversed(finish))


def list_bfs_forest(g: GraphInstance, rows, roots=None, stop_at: int | None = None) -> list[int]:
    """BFS forest that follows each adjacency row in its listed order."""
    parent = [-1] * g.n
    seen: set[int] = set()
    for root in (range(g.n) if roots is None else roots):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in rows[u]:
                if v not in seen:
                    seen.add(v)
                    parent[v] = u
                    queue.append(v)
                    if v == stop_at:
                        return parent
    return parent


def rows_of(x, n: int) -> list[list[int]]:
    return [[a for a in x[v * (n - 1):(v + 1) * (n - 1)] if a != n] for v in range(n)]


# ---------------------------------------------------------------- brute force

def reachability(g: GraphInstance) -> list[set[int]]:
    """Transitive closure by repeated squaring of the reachability relation."""
    reach = [{v} | set(g.neighbors(v)) for v in range(g.n)]
    changed = True
    while changed:
        changed = False
        for v in range(g.n):
            new = set().union(*(reach[w] for w in reach[v]))
            if new != reach[v]:
                reach[v] = new
                changed = True
    return reach


def brute_components(g: GraphInstance) -> tuple[tuple[int, ...], ...]:
    """Weak components (connected components when undirected)."""
    und = GraphInstance(g.n, frozenset((min(u, v), max(u, v)) for u, v in g.edges), False)
    reach = reachability(und)
    return canonical_partition({frozenset(reach[v]) for v in range(g.n)})


def brute_scc(g: GraphInstance) -> tuple[tuple[int, ...], ...]:
    reach = reachability(g)
    return canonical_partition({frozenset(w for w in reach[v] if v in reach[w]) for v in range(g.n)})


def brute_bipartite(g: GraphInstance) -> bool:
    for colors in itertools.product((0, 1), repeat=g.n):
        if all(colors[u] != colors[v] for u, v in g.edges):
            return True
    return False


def brute_has_cycle(g: GraphInstance) -> bool:
    """Undirected cycle test: a forest has exactly ``n - #components`` edges."""
    return len(g.edges) > g.n - len(brute_components(g))


def brute_distance(g: GraphInstance, s: int, t: int) -> int | None:
    """Length of the shortest walk by layered reachability."""
    frontier, seen, d = {s}, {s}, 0
    while frontier:
        if t in frontier:
            return d
        frontier = {w for v in frontier for w in g.neighbors(v)} - seen
        seen |= frontier
        d += 1
    return None


def is_path(g: GraphInstance, path) -> bool:
    return all(g.has_edge(a, b) for a, b in zip(path, path[1:])) and len(set(path)) == len(path)


def is_topological_order(g: GraphInstance, order) -> bool:
    pos = {v: i for i, v in enumerate(order)}
    return sorted(order) == list(range(g.n)) and all(pos[u] < pos[v] for u, v in g.edges)


def is_spanning_forest(g: GraphInstance, parent) -> bool:
    """Parent array whose edges are graph edges and whose trees are the components."""
    if any(p != -1 and not g.has_edge(p, v) for v, p in enumerate(parent)):
        return False
    roots = sum(1 for p in parent if p == -1)
    return roots == len(brute_components(g))


def brute_smallest_cycle_through(g: GraphInstance, v: int) -> int | None:
    """Smallest directed cycle containing ``v`` by checking simple paths of growing length."""
    n = g.n
    for length in range(2, n + 1):
        for mid in itertools.permutations([w for w in range(n) if w != v], length - 1):
            cyc = (v,) + mid + (v,)
            if all(g.has_edge(a, b) for a, b in zip(cyc, cyc[1:])):
                return length
    return None


def brute_k_cycle_through(g: GraphInstance, v: int, k: int) -> bool:
    """Whether an undirected simple cycle of length ``k`` passes through ``v``."""
    for mid in itertools.permutations([w for w in range(g.n) if w != v], k - 1):
        cyc = (v,) + mid + (v,)
        if all(g.has_edge(a, b) for a, b in zip(cyc, cyc[1:])):
            return True
    return False


def brute_max_matching(g: GraphInstance) -> int:
    """Size of a maximum matching by trying edge subsets from the largest size down."""
    edges = sorted(g.edges)
    for size in range(g.n // 2, 0, -1):
        for sub in itertools.combinations(edges, size):
            ends = [v for e in sub for v in e]
            if len(set(ends)) == len(ends):
                return size
    return 0


def is_matching(g: GraphInstance, pairs) -> bool:
    ends = [v for e in pairs for v in e]
    return len(set(ends)) == len(ends) and all(g.has_edge(a, b) for a, b in pairs)
