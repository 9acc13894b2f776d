"""Graph problems in the adjacency-matrix model.

Every program reads edge bits through a :class:`MatrixSession`, which caches
answers so that no coordinate is queried twice on a run.  A 1-answer is red
and a 0-answer black throughout.
"""

from __future__ import annotations

import math
import random
from collections import deque
from collections.abc import Callable

from ..model import FunctionSpec, ProgramTree, RandomizedTreeFamily
from . import reference as ref
from .entry import CatalogEntry, bit_query, require
from .graphs import (
    CycleDraw,
    GraphInstance,
    all_dags,
    all_graphs,
    cycle_reduction,
    decode_matrix,
    encode_matrix,
    is_acyclic,
    k_cycle_subgraph,
    matrix_index,
    matrix_pairs,
    random_bipartite_graph,
    random_graph,
)

KINDS = ("bfs_tree", "dfs_tree", "bipartiteness", "forest_detection", "st_shortest_path",
         "topological_sort", "components", "strongly_connected_components",
         "smallest_cycle_via_vertex", "k_cycle_via_vertex")


class MatrixSession:
    """Query-once access to the edge bits of one input."""

    def __init__(self, n: int, directed: bool):
        self.n = n
        self.directed = directed
        self.index = matrix_index(n, directed)
        self.known: dict[tuple[int, int], int] = {}

    def key(self, u: int, v: int) -> tuple[int, int]:
        return (u, v) if self.directed else (min(u, v), max(u, v))

    def edge(self, u: int, v: int):
        k = self.key(u, v)
        if k not in self.known:
            self.known[k] = yield bit_query(self.index[k])
        return self.known[k]

    def queried(self, u: int, v: int) -> bool:
        return self.key(u, v) in self.known


Edge = Callable[[int, int], object]


def bfs_program(n: int, edge: Edge, roots=None, stop_at: int | None = None):
    """BFS forest (parent array and depths) with ascending scans."""
    parent = [-1] * n
    depth = [-1] * n
    unseen = set(range(n))
    for root in (range(n) if roots is None else roots):
        if root not in unseen:
            continue
        unseen.discard(root)
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in range(n):
                if v in unseen and (yield from edge(u, v)):
                    parent[v], depth[v] = u, depth[u] + 1
                    unseen.discard(v)
                    queue.append(v)
                    if v == stop_at:
                        return parent, depth
    return parent, depth


def dfs_program(n: int, edge: Edge, order=None):
    """Finishing order and DFS trees with ascending scans."""
    unseen = set(range(n))
    finish: list[int] = []
    trees: list[list[int]] = []

    def visit(s, comp):
        unseen.discard(s)
        comp.append(s)
        for v in range(n):
            if v in unseen and (yield from edge(s, v)):
                yield from visit(v, comp)
        finish.append(s)

    for v in (range(n) if order is None else order):
        if v in unseen:
            comp: list[int] = []
            yield from visit(v, comp)
            trees.append(comp)
    return finish, trees


def smallest_cycle_program(n: int, v: int, edge: Edge):
    """BFS from ``v``; each dequeued ``u`` first asks for the arc ``u -> v``."""
    depth = {v: 0}
    unseen = set(range(n)) - {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        if u != v and (yield from edge(u, v)):
            return depth[u] + 1
        for w in range(n):
            if w in unseen and (yield from edge(u, w)):
                depth[w] = depth[u] + 1
                unseen.discard(w)
                queue.append(w)
    return None


# ---------------------------------------------------------------- domains

def graph_domain(n: int, directed: bool, domain="all", seed: int = 0, acyclic: bool = False,
                 bipartite_mix: bool = False) -> list[GraphInstance]:
    """``"all"``, an integer sample size, or an explicit list of graphs."""
    if isinstance(domain, (list, tuple)):
        return list(domain)
    if domain == "all":
        graphs = all_dags(n) if acyclic else all_graphs(n, directed)
        return list(graphs)
    count = int(domain)
    rng = random.Random(seed)
    seen: dict[tuple, GraphInstance] = {}
    tries = 0
    while len(seen) < count and tries < 50 * count:
        tries += 1
        p = rng.random()
        if bipartite_mix and tries % 2 == 0:
            g = random_bipartite_graph(n, p, rng)
        else:
            g = random_graph(n, p, rng, directed)
        if acyclic and not is_acyclic(g):
            continue
        seen.setdefault(encode_matrix(g), g)
    return list(seen.values())


def _spec(name: str, n: int, directed: bool, graphs, f, m=None) -> FunctionSpec:
    npairs = len(matrix_pairs(n, directed))
    enc = [encode_matrix(g) for g in graphs]
    return FunctionSpec(npairs, 2, enc, lambda x: f(decode_matrix(x, n, directed)), m=m, name=name)


def _tree(name: str, n: int, directed: bool, body) -> ProgramTree:
    npairs = len(matrix_pairs(n, directed))

    def program():
        s = MatrixSession(n, directed)
        result = yield from body(s)
        return result

    return ProgramTree(npairs, 2, program, name=name)


# ---------------------------------------------------------------- problems

def adjmatrix_problem(kind: str, n: int, directed: bool | None = None, domain="all",
                      seed: int = 0, **params) -> CatalogEntry:
    """Catalog entry for one adjacency-matrix problem on ``n``-vertex graphs."""
    require(kind in KINDS, f"unknown adjacency-matrix problem {kind!r}")
    require(n >= 2, "graphs need at least two vertices")
    builder = _BUILDERS[kind]
    return builder(n, directed, domain, seed, **params)


def _bfs_tree(n, directed, domain, seed):
    directed = bool(directed)
    graphs = graph_domain(n, directed, domain, seed)
    tree = _tree("bfs_tree", n, directed, lambda s: _parents(bfs_program(n, s.edge)))
    fn = _spec("bfs_tree", n, directed, graphs, lambda g: tuple(ref.bfs_forest(g)))
    check = lambda x, lab: ref.is_spanning_forest(decode_matrix(x, n, directed), lab)  # noqa: E731
    return CatalogEntry("matrix.bfs_tree", {"n": n, "directed": directed}, tree, fn,
                        bounds={"T": n * n, "G": n}, check_output=check)


def _parents(gen):
    parent, _ = yield from gen
    return tuple(parent)


def _dfs_tree(n, directed, domain, seed):
    directed = bool(directed)
    graphs = graph_domain(n, directed, domain, seed)

    def body(s):
        finish, trees = yield from dfs_program(n, s.edge)
        return tuple(tuple(t) for t in trees)

    tree = _tree("dfs_tree", n, directed, body)
    fn = _spec("dfs_tree", n, directed, graphs,
               lambda g: tuple(tuple(t) for t in ref.dfs_finish_order(g)[1]))
    return CatalogEntry("matrix.dfs_tree", {"n": n, "directed": directed}, tree, fn,
                        bounds={"T": n * n, "G": n})


def _bipartiteness(n, directed, domain, seed):
    require(not directed, "bipartiteness is defined on undirected graphs")
    graphs = graph_domain(n, False, domain, seed, bipartite_mix=True)

    def body(s):
        _, depth = yield from bfs_program(n, s.edge)
        for u, v in matrix_pairs(n, False):
            if depth[u] % 2 == depth[v] % 2 and not s.queried(u, v):
                if (yield from s.edge(u, v)):
                    return False
        return True

    tree = _tree("bipartiteness", n, False, body)
    fn = _spec("bipartiteness", n, False, graphs, ref.brute_bipartite, m=2)
    return CatalogEntry("matrix.bipartiteness", {"n": n}, tree, fn,
                        bounds={"T": n * (n - 1) // 2, "G": n},
                        check_output=lambda x, lab: lab == ref.brute_bipartite(decode_matrix(x, n)))


def _forest_detection(n, directed, domain, seed):
    require(not directed, "forest detection is defined on undirected graphs")
    graphs = graph_domain(n, False, domain, seed)

    def body(s):
        yield from bfs_program(n, s.edge)
        for u, v in matrix_pairs(n, False):
            if not s.queried(u, v) and (yield from s.edge(u, v)):
                return "cycle"
        return "forest"

    tree = _tree("forest_detection", n, False, body)
    label = lambda g: "cycle" if ref.brute_has_cycle(g) else "forest"  # noqa: E731
    fn = _spec("forest_detection", n, False, graphs, label, m=2)
    return CatalogEntry("matrix.forest_detection", {"n": n}, tree, fn,
                        bounds={"T": n * (n - 1) // 2, "G": n},
                        check_output=lambda x, lab: lab == label(decode_matrix(x, n)))


def _st_path(n, directed, domain, seed, s=0, t=None):
    directed = bool(directed)
    t = n - 1 if t is None else t
    require(0 <= s < n and 0 <= t < n and s != t, f"bad endpoints s={s} t={t}")
    graphs = graph_domain(n, directed, domain, seed)

    def body(sess):
        parent, _ = yield from bfs_program(n, sess.edge, roots=[s], stop_at=t)
        return ref.path_from_parents(parent, s, t)

    tree = _tree("st_shortest_path", n, directed, body)
    fn = _spec("st_shortest_path", n, directed, graphs, lambda g: ref.bfs_shortest_path(g, s, t))

    def check(x, lab):
        g = decode_matrix(x, n, directed)
        d = ref.brute_distance(g, s, t)
        if lab is None:
            return d is None
        return d is not None and len(lab) - 1 == d and ref.is_path(g, lab) and lab[0] == s and lab[-1] == t

    return CatalogEntry("matrix.st_shortest_path", {"n": n, "directed": directed, "s": s, "t": t},
                        tree, fn, bounds={"T": n * n, "G": n}, check_output=check)


def _topological_sort(n, directed, domain, seed):
    require(directed is None or directed, "topological sort needs a directed graph")
    graphs = graph_domain(n, True, domain, seed, acyclic=True)

    def body(s):
        finish, _ = yield from dfs_program(n, s.edge)
        return tuple(reversed(finish))

    tree = _tree("topological_sort", n, True, body)
    fn = _spec("topological_sort", n, True, graphs, ref.dfs_topological_order)
    check = lambda x, lab: ref.is_topological_order(decode_matrix(x, n, True), lab)  # noqa: E731
    return CatalogEntry("matrix.topological_sort", {"n": n}, tree, fn,
                        bounds={"T": n * n, "G": n}, check_output=check)


def _components(n, directed, domain, seed):
    require(not directed, "components are computed on undirected graphs")
    graphs = graph_domain(n, False, domain, seed)

    def body(s):
        _, trees = yield from dfs_program(n, s.edge)
        return ref.canonical_partition(trees)

    tree = _tree("components", n, False, body)
    fn = _spec("components", n, False, graphs, ref.brute_components)
    return CatalogEntry("matrix.components", {"n": n}, tree, fn, bounds={"T": n * n, "G": n},
                        check_output=lambda x, lab: lab == ref.brute_components(decode_matrix(x, n)))


def _scc(n, directed, domain, seed):
    require(directed is None or directed, "strongly connected components need a directed graph")
    graphs = graph_domain(n, True, domain, seed)

    def body(s):
        def reverse_edge(u, v):
            return (yield from s.edge(v, u))
        finish, _ = yield from dfs_program(n, reverse_edge)
        _, trees = yield from dfs_program(n, s.edge, order=list(reversed(finish)))
        return ref.canonical_partition(trees)

    tree = _tree("strongly_connected_components", n, True, body)
    fn = _spec("strongly_connected_components", n, True, graphs, ref.brute_scc)
    return CatalogEntry("matrix.strongly_connected_components", {"n": n}, tree, fn,
                        bounds={"T": n * (n - 1), "G": 2 * n},
                        check_output=lambda x, lab: lab == ref.brute_scc(decode_matrix(x, n, True)))


def _smallest_cycle(n, directed, domain, seed, v=0, s=None, t=None):
    """Smallest directed cycle through ``v``; with ``s`` and ``t`` it runs on the reduction graph."""
    require(directed is None or directed, "smallest cycle is defined on directed graphs")
    graphs = graph_domain(n, True, domain, seed)
    if s is None:
        require(0 <= v < n, f"bad vertex {v}")

        def body(sess):
            return (yield from smallest_cycle_program(n, v, sess.edge))

        label = lambda g: ref.brute_smallest_cycle_through(g, v)  # noqa: E731
        params = {"n": n, "v": v}
    else:
        require(t is not None and 0 <= s < n and 0 <= t < n and s != t, f"bad endpoints s={s} t={t}")
        w = n

        def body(sess):
            def edge_h(a, b):
                if w in (a, b):
                    return (a, b) in ((w, s), (t, w))
                return (yield from sess.edge(a, b))
            return (yield from smallest_cycle_program(n + 1, w, edge_h))

        label = lambda g: ref.brute_smallest_cycle_through(cycle_reduction(g, s, t), w)  # noqa: E731
        params = {"n": n, "s": s, "t": t}
    tree = _tree("smallest_cycle_via_vertex", n, True, body)
    fn = _spec("smallest_cycle_via_vertex", n, True, graphs, label)
    return CatalogEntry("matrix.smallest_cycle_via_vertex", params, tree, fn,
                        bounds={"T": n * (n - 1), "G": n + 1},
                        check_output=lambda x, lab: lab == label(decode_matrix(x, n, True)))


def default_rounds(k: int) -> int:
    return math.ceil(3 * (2 * k) ** (k - 1))


def k_cycle_program(n: int, v: int, k: int, draws: list[CycleDraw]):
    """Repeat the smallest-cycle search on the subgraph kept by each draw."""
    def program():
        sess = MatrixSession(n, False)
        for draw in draws:
            def edge_h(a, b, draw=draw):
                if not draw.allows(a, b):
                    return 0
                return (yield from sess.edge(a, b))
            length = yield from smallest_cycle_program(n, v, edge_h)
            if length == k:
                return True
        return False
    return program


def _k_cycle(n, directed, domain, seed, k=3, v=0, rounds=None, members=32):
    require(not directed, "the k-cycle reduction starts from an undirected graph")
    require(k >= 3 and 0 <= v < n, f"bad parameters k={k} v={v}")
    rounds = default_rounds(k) if rounds is None else int(rounds)
    require(rounds >= 1 and members >= 1, "rounds and members must be positive")
    graphs = graph_domain(n, False, domain, seed)
    rng = random.Random(seed)
    npairs = len(matrix_pairs(n, False))
    family = []
    for z in range(members):
        draws = [CycleDraw.draw(n, k, rng) for _ in range(rounds)]
        family.append((z, ProgramTree(npairs, 2, k_cycle_program(n, v, k, draws),
                                      name=f"k_cycle[{z}]")))
    fam = RandomizedTreeFamily(family, name=f"k_cycle(k={k})")
    label = lambda g: ref.brute_k_cycle_through(g, v, k)  # noqa: E731
    fn = _spec("k_cycle_via_vertex", n, False, graphs, label, m=2)
    return CatalogEntry("matrix.k_cycle_via_vertex",
                        {"n": n, "k": k, "v": v, "rounds": rounds, "members": members, "seed": seed},
                        fam, fn, bounds={"T": npairs, "p_round": 1 / (2 * k) ** (k - 1)},
                        check_output=lambda x, lab: lab == label(decode_matrix(x, n)))


def k_cycle_single_draw(g: GraphInstance, draw: CycleDraw, v: int) -> ProgramTree:
    """One round of the k-cycle search as a tree over ``g``'s encoding length."""
    npairs = len(matrix_pairs(g.n, False))
    return ProgramTree(npairs, 2, k_cycle_program(g.n, v, draw.k, [draw]), name="k_cycle_round")


def reduced_graph(g: GraphInstance, draw: CycleDraw) -> GraphInstance:
    return k_cycle_subgraph(g, draw)


_BUILDERS = {
    "bfs_tree": _bfs_tree,
    "dfs_tree": _dfs_tree,
    "bipartiteness": _bipartiteness,
    "forest_detection": _forest_detection,
    "st_shortest_path": _st_path,
    "topological_sort": _topological_sort,
    "components": _components,
    "strongly_connected_components": _scc,
    "smallest_cycle_via_vertex": _smallest_cycle,
    "k_cycle_via_vertex": _k_cycle,
}
