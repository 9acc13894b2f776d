"""Span program with orthogonal inputs built from a colored tree.

The basis is the vertex set of the tree.  Every internal vertex ``v`` querying
index ``j`` contributes one input vector per symbol ``q``: ``sqrt(W)(|v> - |child>)``
where ``child`` is the end of the block holding ``q`` and ``W`` is the weight of
that block's color.  The vector is available on ``x`` iff ``x_j = q``.

Weights are symbolic: a weight is ``value(key) ** e`` for the schedule's symbol
``(key, e)``, so the witness axioms are checked with exact rational arithmetic
and only the final sizes are evaluated as floats.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .certificate import WeightSchedule
from .model import RED, ROOT, FunctionSpec, Query, TreeProgram, VertexId

Input = tuple[int, ...]
Monomial = tuple[tuple[Hashable, int], ...]   # (key, exponent in halves), sorted by repr


class SpanProgramError(Exception):
    """The tree cannot be turned into a span program."""


# ---------------------------------------------------------------- exact scalars

def _mono(powers: dict) -> Monomial:
    return tuple(sorted(((k, e) for k, e in powers.items() if e), key=lambda p: repr(p[0])))


class Poly:
    """Finite sum of rational multiples of products of ``value(key) ** (e / 2)``."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Monomial, Fraction] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): Fraction(c)})

    @classmethod
    def power(cls, key: Hashable, halves: int, coef=1) -> "Poly":
        return cls({_mono({key: halves}): Fraction(coef)})

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                powers = dict(m1)
                for k, e in m2:
                    powers[k] = powers.get(k, 0) + e
                m = _mono(powers)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def evaluate(self, value) -> float:
        return sum(float(c) * math.prod(value(k) ** (e / 2) for k, e in m)
                   for m, c in self.terms.items())

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms.items():
            body = "*".join(f"{k}^({e}/2)" for k, e in m)
            parts.append(f"{c}" + (f"*{body}" if body else ""))
        return " + ".join(parts)


def _sum(polys: Iterable[Poly]) -> Poly:
    out = Poly()
    for p in polys:
        out = out + p
    return out


# ---------------------------------------------------------------- program

@dataclass(frozen=True)
class Column:
    """Input vector ``sqrt(W)(|parent> - |child>)`` available iff ``x_j = q``."""

    parent: int
    child: int
    j: int
    q: int
    color: str
    key: Hashable
    exp: int
    weight: float

    def scale(self) -> Poly:
        """``sqrt(W)`` as an exact scalar."""
        return Poly.power(self.key, self.exp)

    def inverse_scale(self) -> Poly:
        return Poly.power(self.key, -self.exp)


@dataclass
class Node:
    vertex: VertexId
    state: tuple[int, ...]
    reds_before: int
    query: Query | None = None
    children: tuple[int, ...] = ()
    label: Hashable = None
    columns: dict[int, int] = field(default_factory=dict)   # symbol -> column index

    @property
    def is_leaf(self) -> bool:
        return self.query is None


@dataclass
class SpanProgram:
    tree: TreeProgram
    weights: WeightSchedule
    nodes: list[Node]
    columns: list[Column]
    leaves: list[int]

    @property
    def dimension(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> int:
        return 0

    def target(self, leaf: int) -> dict[int, int]:
        """``|r> - |leaf>`` as a sparse integer vector."""
        if leaf == self.root:
            return {}
        return {self.root: 1, leaf: -1}

    def path(self, x: Sequence[int]) -> list[int]:
        """Node indices from the root to the leaf reached by ``x``."""
        out = [self.root]
        node = self.nodes[self.root]
        while not node.is_leaf:
            b = node.query.partition.block_of(x[node.query.index - 1])
            out.append(node.children[b])
            node = self.nodes[out[-1]]
        return out

    def leaf_of(self, x: Sequence[int]) -> int:
        return self.path(x)[-1]

    def available(self, x: Sequence[int]) -> list[int]:
        return [k for k, c in enumerate(self.columns) if x[c.j - 1] == c.q]

    def matrix(self) -> np.ndarray:
        """Dense ``d x |I|`` input matrix; only for small programs."""
        A = np.zeros((self.dimension, len(self.columns)))
        for k, c in enumerate(self.columns):
            s = math.sqrt(c.weight)
            A[c.parent, k] = s
            A[c.child, k] = -s
        return A

    def value(self, key: Hashable) -> float:
        return self.weights.value(key)


def build_span_program(tree: TreeProgram, weights: WeightSchedule,
                       fn: FunctionSpec | None = None, cap: int = 100_000) -> SpanProgram:
    """Materialize every vertex of ``tree`` reachable through ``step`` and emit the inputs.

    ``fn`` is accepted for symmetry with the certificate builders; the program
    evaluates the leaf function of the tree, which the witness checks compare
    against ``fn`` separately.
    """
    nodes = [Node(ROOT, tree.root(), 0)]
    columns: list[Column] = []
    leaves: list[int] = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        node = nodes[i]
        if tree.is_leaf(node.state):
            node.label = tree.leaf_output(node.state)
            leaves.append(i)
            continue
        step = tree.step(node.state)
        q = step.query
        if len(q.colors) != len(q.partition):
            raise SpanProgramError(f"uncolored edge at {node.vertex}")
        node.query = q
        kids = []
        for b, child_state in enumerate(step.children):
            color = q.colors[b]
            g = node.reds_before + (1 if color == RED else 0)
            kids.append(len(nodes))
            nodes.append(Node(node.vertex.child(q.index, q.partition.blocks[b]), child_state, g))
            if len(nodes) > cap:
                raise SpanProgramError(f"tree has more than {cap} vertices")
            queue.append(kids[-1])
        node.children = tuple(kids)
        for sym in range(tree.ell):
            b = q.partition.block_of(sym)
            color = q.colors[b]
            key, exp = weights.symbol(node.vertex, node.reds_before, color)
            node.columns[sym] = len(columns)
            columns.append(Column(i, kids[b], q.index, sym, color, key, exp,
                                  weights.weight(node.vertex, node.reds_before, color)))
    return SpanProgram(tree, weights, nodes, columns, leaves)


# ---------------------------------------------------------------- witnesses

def positive_witness(program: SpanProgram, x: Sequence[int]) -> dict[int, Poly]:
    """Coefficient ``1/sqrt(W)`` on the available column of every path step."""
    out = {}
    for i in program.path(x)[:-1]:
        node = program.nodes[i]
        k = node.columns[x[node.query.index - 1]]
        out[k] = program.columns[k].inverse_scale()
    return out


def negative_witness(program: SpanProgram, x: Sequence[int]) -> dict[int, int]:
    """Indicator of the path vertices, leaf included."""
    return {i: 1 for i in program.path(x)}


@dataclass(frozen=True)
class WitnessCheck:
    x: Input
    leaf: int
    positive_ok: bool
    uses_only_available: bool
    orthogonal: bool
    targets_ok: bool
    positive_size: float
    negative_size: float
    contributing: frozenset[int]

    @property
    def ok(self) -> bool:
        return self.positive_ok and self.uses_only_available and self.orthogonal and self.targets_ok


def check_witnesses(program: SpanProgram, x: Sequence[int]) -> WitnessCheck:
    """All witness axioms for one input, exactly."""
    x = tuple(x)
    leaf = program.leaf_of(x)
    pos = positive_witness(program, x)
    neg = negative_witness(program, x)
    avail = set(program.available(x))

    image: dict[int, Poly] = {}
    for k, coef in pos.items():
        c = program.columns[k]
        term = c.scale() * coef
        image[c.parent] = image.get(c.parent, Poly()) + term
        image[c.child] = image.get(c.child, Poly()) - term
    want = program.target(leaf)
    positive_ok = all(image.get(i, Poly()) == want.get(i, 0) for i in set(image) | set(want))

    # <column | neg> = sqrt(W) (neg[parent] - neg[child]); the scale is nonzero
    diffs = {k: neg.get(c.parent, 0) - neg.get(c.child, 0) for k, c in enumerate(program.columns)}
    orthogonal = all(diffs[k] == 0 for k in avail)
    targets_ok = True
    for beta in program.leaves:
        t = program.target(beta)
        inner = sum(v * neg.get(i, 0) for i, v in t.items())
        if inner != (0 if beta == leaf else 1):
            targets_ok = False
            break

    psize = _sum(coef * coef for coef in pos.values())
    contributing = frozenset(k for k, d in diffs.items() if d)
    nsize = _sum(program.columns[k].scale() * program.columns[k].scale() * Poly.const(diffs[k] ** 2)
                 for k in contributing)
    return WitnessCheck(x, leaf, positive_ok, set(pos) <= avail, orthogonal, targets_ok,
                        psize.evaluate(program.value), nsize.evaluate(program.value), contributing)


@dataclass(frozen=True)
class WitnessSizes:
    positive: float
    negative: float
    argmax_positive: Input | None
    argmax_negative: Input | None
    all_ok: bool
    failures: tuple[Input, ...]
    label_mismatches: tuple[Input, ...]

    @property
    def wsize(self) -> float:
        return math.sqrt(self.positive * self.negative)


def witness_sizes(program: SpanProgram, inputs: Iterable[Sequence[int]],
                  fn: FunctionSpec | None = None) -> WitnessSizes:
    """``(max ||w_x||^2, max ||A^T wbar_x||^2)`` over ``inputs`` plus the axiom verdict.

    With ``fn`` the leaf label reached by each input is also compared with ``f(x)``.
    """
    best_p = best_n = 0.0
    arg_p = arg_n = None
    failures, mismatches = [], []
    for x in inputs:
        chk = check_witnesses(program, x)
        if not chk.ok:
            failures.append(chk.x)
        if fn is not None and program.nodes[chk.leaf].label != fn(chk.x):
            mismatches.append(chk.x)
        if arg_p is None or chk.positive_size > best_p:
            best_p, arg_p = chk.positive_size, chk.x
        if arg_n is None or chk.negative_size > best_n:
            best_n, arg_n = chk.negative_size, chk.x
    return WitnessSizes(best_p, best_n, arg_p, arg_n, not failures and not mismatches,
                        tuple(failures), tuple(mismatches))


def float_axiom_residual(program: SpanProgram, x: Sequence[int]) -> float:
    """Dense floating-point cross-check of ``A w_x = t`` and ``A^T wbar_x = 0`` on available columns."""
    A = program.matrix()
    w = np.zeros(len(program.columns))
    for k, coef in positive_witness(program, x).items():
        w[k] = coef.evaluate(program.value)
    t = np.zeros(program.dimension)
    for i, v in program.target(program.leaf_of(x)).items():
        t[i] = v
    wbar = np.zeros(program.dimension)
    for i in negative_witness(program, x):
        wbar[i] = 1.0
    avail = program.available(x)
    return max(float(np.abs(A @ w - t).max(initial=0.0)),
               float(np.abs((A.T @ wbar)[avail]).max(initial=0.0)))
