"""Graph problems in the adjacency-list model.

Coordinate ``v*(n-1) + i`` holds the ``i``-th neighbor of ``v`` or nil (symbol
``n``).  At each query the vertices already discovered form one black block;
every undiscovered vertex and nil is a red singleton.
"""

from __future__ import annotations

from collections import deque

from ..model import FunctionSpec, ProgramTree
from . import reference as ref
from .entry import CatalogEntry, require, split_query
from .graphs import (
    GraphInstance,
    all_bipartite,
    all_dags,
    all_graphs,
    all_list_orderings,
    decode_list,
    encode_list,
    list_index,
)

KINDS = ("bfs_tree", "st_shortest_path", "bipartiteness", "topological_sort", "components",
         "hopcroft_karp_matching")


class ListSession:
    """Reads adjacency-list entries; returns the answered block as a sorted list."""

    def __init__(self, n: int):
        self.n = n
        self.nil = n
        self.ell = n + 1

    def entry(self, v: int, i: int, black: set[int], red_groups=()):
        q, blocks = split_query(list_index(self.n, v, i), black, self.ell, red_groups)
        b = yield q
        return blocks[b]


def list_bfs_program(n: int, sess: ListSession, roots=None, stop_at: int | None = None,
                     parity_check: bool = False):
    """BFS forest; with ``parity_check`` it stops at the first same-parity neighbor.

    Returns ``(parent, depth, odd_edge_found)``.
    """
    parent = [-1] * n
    depth = [-1] * n
    found: set[int] = set()
    for root in (range(n) if roots is None else roots):
        if root in found:
            continue
        found.add(root)
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for i in range(1, n):
                groups = ()
                black = set(found)
                if parity_check:
                    same = {w for w in found if depth[w] % 2 == depth[u] % 2}
                    black -= same
                    groups = (same,)
                block = yield from sess.entry(u, i, black, groups)
                a = block[0]
                if a in black:
                    continue
                if parity_check and a in groups[0]:
                    return parent, depth, True
                if a == sess.nil:
                    break
                found.add(a)
                parent[a], depth[a] = u, depth[u] + 1
                queue.append(a)
                if a == stop_at:
                    return parent, depth, False
    return parent, depth, False


def list_dfs_program(n: int, sess: ListSession):
    found: set[int] = set()
    finish: list[int] = []
    trees: list[list[int]] = []

    def visit(s, comp):
        found.add(s)
        comp.append(s)
        for i in range(1, n):
            black = set(found)
            block = yield from sess.entry(s, i, black)
            a = block[0]
            if a in black:
                continue
            if a == sess.nil:
                break
            yield from visit(a, comp)
        finish.append(s)

    for v in range(n):
        if v not in found:
            comp: list[int] = []
            yield from visit(v, comp)
            trees.append(comp)
    return finish, trees


def hopcroft_karp_program(a: int, b: int, sess: ListSession):
    """Phases of BFS over the residual graph, augmenting along disjoint BFS-forest paths.

    Left vertices are ``0..a-1``.  Each phase reads the lists of the left
    vertices it reaches; a phase repeats entries read by earlier phases.
    """
    n = a + b
    left = set(range(a))
    mate = [-1] * n
    while True:
        dist: dict[int, int] = {}
        parent: dict[int, int] = {}
        found: set[int] = set()
        queue: deque[int] = deque()
        for x in range(a):
            if mate[x] == -1:
                dist[x] = 1
                found.add(x)
                queue.append(x)
        free_right: list[int] = []
        while queue:
            u = queue.popleft()
            if u < a:
                for i in range(1, n):
                    black = (found - left) | left
                    block = yield from sess.entry(u, i, black)
                    y = block[0]
                    if y in black:
                        continue
                    if y == sess.nil:
                        break
                    found.add(y)
                    dist[y], parent[y] = dist[u] + 1, u
                    queue.append(y)
            elif mate[u] == -1:
                free_right.append(u)
            elif mate[u] not in found:
                x = mate[u]
                found.add(x)
                dist[x], parent[x] = dist[u] + 1, u
                queue.append(x)
        if not free_right:
            return tuple(sorted((x, mate[x]) for x in range(a) if mate[x] != -1))
        shortest = min(dist[y] for y in free_right)
        used: set[int] = set()
        for y in sorted(free_right):
            if dist[y] != shortest:
                continue
            path = [y]
            while path[-1] in parent:
                path.append(parent[path[-1]])
            if used.intersection(path):
                continue
            used.update(path)
            path.reverse()
            for k in range(0, len(path), 2):
                mate[path[k]], mate[path[k + 1]] = path[k + 1], path[k]


def reference_hopcroft_karp(a: int, b: int, rows) -> tuple[tuple[int, int], ...]:
    """The same phase structure written directly over the adjacency rows."""
    n = a + b
    mate = [-1] * n
    while True:
        dist, parent, found = {}, {}, set()
        queue = deque(x for x in range(a) if mate[x] == -1)
        for x in queue:
            dist[x] = 1
            found.add(x)
        free_right = []
        while queue:
            u = queue.popleft()
            if u < a:
                for y in rows[u]:
                    if y not in found:
                        found.add(y)
                        dist[y], parent[y] = dist[u] + 1, u
                        queue.append(y)
            elif mate[u] == -1:
                free_right.append(u)
            elif mate[u] not in found:
                x = mate[u]
                found.add(x)
                dist[x], parent[x] = dist[u] + 1, u
                queue.append(x)
        if not free_right:
            return tuple(sorted((x, mate[x]) for x in range(a) if mate[x] != -1))
        shortest = min(dist[y] for y in free_right)
        used = set()
        for y in sorted(free_right):
            if dist[y] != shortest:
                continue
            path = [y]
            while path[-1] in parent:
                path.append(parent[path[-1]])
            if used.intersection(path):
                continue
            used.update(path)
            path.reverse()
            for k in range(0, len(path), 2):
                mate[path[k]], mate[path[k + 1]] = path[k + 1], path[k]


# ---------------------------------------------------------------- domains

def list_domain(n: int, directed: bool = False, domain="canonical", graphs=None,
                acyclic: bool = False) -> list[tuple[int, ...]]:
    """Encodings: ``"canonical"`` (sorted rows) or ``"all_orderings"`` (every row order, n <= 3)."""
    if graphs is None:
        graphs = list(all_dags(n)) if acyclic else list(all_graphs(n, directed))
    if domain == "canonical":
        return [encode_list(g) for g in graphs]
    if domain == "all_orderings":
        require(n <= 3, "all_orderings mode is limited to n <= 3")
        return [x for g in graphs for x in all_list_orderings(g)]
    if isinstance(domain, (list, tuple)):
        return [encode_list(g) if isinstance(g, GraphInstance) else tuple(g) for g in domain]
    raise ValueError(f"unknown adjacency-list domain {domain!r}")


def _spec(name, n, directed, xs, f, m=None) -> FunctionSpec:
    def evaluate(x):
        g = decode_list(x, n, directed)
        return f(g, ref.rows_of(x, n))
    return FunctionSpec(n * (n - 1), n + 1, xs, evaluate, m=m, name=name)


def _tree(name, n, body, query_once=True) -> ProgramTree:
    def program():
        result = yield from body(ListSession(n))
        return result
    return ProgramTree(n * (n - 1), n + 1, program, name=name, query_once=query_once)


def _entries_bound(n: int) -> int:
    return n * (n - 1)


def adjlist_problem(kind: str, n: int | None = None, directed: bool = False,
                    domain="canonical", **params) -> CatalogEntry:
    """Catalog entry for one adjacency-list problem."""
    require(kind in KINDS, f"unknown adjacency-list problem {kind!r}")
    if kind == "hopcroft_karp_matching":
        return _hopcroft_karp(domain=domain, **params)
    require(n is not None and n >= 2, "graphs need at least two vertices")
    return _BUILDERS[kind](n, directed, domain, **params)


def _bfs_tree(n, directed, domain):
    xs = list_domain(n, directed, domain)

    def body(sess):
        parent, _, _ = yield from list_bfs_program(n, sess)
        return tuple(parent)

    fn = _spec("bfs_tree", n, directed, xs, lambda g, rows: tuple(ref.list_bfs_forest(g, rows)))
    check = lambda x, lab: ref.is_spanning_forest(decode_list(x, n, directed), lab)  # noqa: E731
    return CatalogEntry("list.bfs_tree", {"n": n, "directed": directed}, _tree("bfs_tree", n, body),
                        fn, bounds={"T": _entries_bound(n), "G": 2 * n}, check_output=check)


def _st_path(n, directed, domain, s=0, t=None):
    t = n - 1 if t is None else t
    require(0 <= s < n and 0 <= t < n and s != t, f"bad endpoints s={s} t={t}")
    xs = list_domain(n, directed, domain)

    def body(sess):
        parent, _, _ = yield from list_bfs_program(n, sess, roots=[s], stop_at=t)
        return ref.path_from_parents(parent, s, t)

    def f(g, rows):
        return ref.path_from_parents(ref.list_bfs_forest(g, rows, roots=[s], stop_at=t), s, t)

    def check(x, lab):
        g = decode_list(x, n, directed)
        d = ref.brute_distance(g, s, t)
        if lab is None:
            return d is None
        return d is not None and len(lab) - 1 == d and ref.is_path(g, lab)

    return CatalogEntry("list.st_shortest_path", {"n": n, "directed": directed, "s": s, "t": t},
                        _tree("st_shortest_path", n, body), _spec("st_shortest_path", n, directed, xs, f),
                        bounds={"T": _entries_bound(n), "G": 2 * n}, check_output=check)


def _bipartiteness(n, directed, domain):
    require(not directed, "bipartiteness is defined on undirected graphs")
    xs = list_domain(n, False, domain)

    def body(sess):
        _, _, odd = yield from list_bfs_program(n, sess, parity_check=True)
        return not odd

    fn = _spec("bipartiteness", n, False, xs, lambda g, rows: ref.brute_bipartite(g), m=2)
    check = lambda x, lab: lab == ref.brute_bipartite(decode_list(x, n))  # noqa: E731
    return CatalogEntry("list.bipartiteness", {"n": n}, _tree("bipartiteness", n, body), fn,
                        bounds={"T": _entries_bound(n), "G": 2 * n}, check_output=check)


def _topological_sort(n, directed, domain):
    xs = list_domain(n, True, domain, acyclic=True)

    def body(sess):
        finish, _ = yield from list_dfs_program(n, sess)
        return tuple(reversed(finish))

    fn = _spec("topological_sort", n, True, xs, ref.list_dfs_topological_order)
    check = lambda x, lab: ref.is_topological_order(decode_list(x, n, True), lab)  # noqa: E731
    return CatalogEntry("list.topological_sort", {"n": n}, _tree("topological_sort", n, body), fn,
                        bounds={"T": _entries_bound(n), "G": 2 * n}, check_output=check)


def _components(n, directed, domain):
    require(not directed, "components are computed on undirected graphs")
    xs = list_domain(n, False, domain)

    def body(sess):
        _, trees = yield from list_dfs_program(n, sess)
        return ref.canonical_partition(trees)

    fn = _spec("components", n, False, xs, lambda g, rows: ref.brute_components(g))
    check = lambda x, lab: lab == ref.brute_components(decode_list(x, n))  # noqa: E731
    return CatalogEntry("list.components", {"n": n}, _tree("components", n, body), fn,
                        bounds={"T": _entries_bound(n), "G": 2 * n}, check_output=check)


def _hopcroft_karp(a: int = 2, b: int = 2, domain="canonical"):
    require(a >= 1 and b >= 1, f"bad part sizes a={a} b={b}")
    n = a + b
    xs = list_domain(n, False, domain, graphs=list(all_bipartite(a, b)))

    def body(sess):
        return (yield from hopcroft_karp_program(a, b, sess))

    fn = _spec("hopcroft_karp_matching", n, False, xs,
               lambda g, rows: reference_hopcroft_karp(a, b, rows))

    def check(x, lab):
        g = decode_list(x, n)
        return ref.is_matching(g, lab) and len(lab) == ref.brute_max_matching(g)

    tree = _tree("hopcroft_karp_matching", n, body, query_once=False)
    return CatalogEntry("list.hopcroft_karp_matching", {"a": a, "b": b}, tree, fn,
                        bounds={"G": n * n ** 0.5 + n}, check_output=check)


_BUILDERS = {
    "bfs_tree": _bfs_tree,
    "st_shortest_path": _st_path,
    "bipartiteness": _bipartiteness,
    "topological_sort": _topological_sort,
    "components": _components,
}
