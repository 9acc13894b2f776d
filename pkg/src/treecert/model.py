"""Functions, generalized decision trees and root-to-leaf transcripts.

A tree is never materialized.  It is written as a *program*: a generator that
yields :class:`Query` objects and is sent back the index of the block that
contains the queried value.  Its return value is the leaf label.  Because the
program only ever sees block indices, two inputs that fall into the same blocks
follow the same path, which is exactly the generalized decision tree semantics.

Vertex identity is the transcript prefix of ``(query index, sorted block)``
pairs, so equality of vertices can be tested without building the tree.
"""

from __future__ import annotations

import warnings
from abc import ABC, abstractmethod
from collections.abc import Callable, Generator, Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

BLACK = "black"
RED = "red"
COLORS = (BLACK, RED)

Input = tuple[int, ...]
Program = Generator["Query", int, Hashable]


class TreeError(Exception):
    """A tree misbehaved while being run on an input."""


class PartitionError(TreeError, ValueError):
    pass


class RepeatedQueryError(TreeError):
    pass


class StepBudgetExceeded(TreeError):
    pass


class QueryPartition:
    """Partition of the alphabet ``[ell]`` into nonempty blocks."""

    __slots__ = ("blocks", "ell", "_block_of")

    def __init__(self, blocks: Iterable[Iterable[int]], ell: int):
        self.blocks = tuple(frozenset(b) for b in blocks)
        self.ell = ell
        block_of = [-1] * ell
        for i, block in enumerate(self.blocks):
            if not block:
                raise PartitionError(f"empty block at position {i}")
            for q in block:
                if not 0 <= q < ell:
                    raise PartitionError(f"symbol {q} outside [0, {ell})")
                if block_of[q] != -1:
                    raise PartitionError(f"symbol {q} appears in two blocks")
                block_of[q] = i
        missing = [q for q in range(ell) if block_of[q] == -1]
        if missing:
            raise PartitionError(f"symbols {missing} not covered by any block")
        self._block_of = tuple(block_of)

    def block_of(self, q: int) -> int:
        return self._block_of[q]

    def canonical_rank(self, b: int) -> int:
        """Rank of block ``b`` when blocks are ordered by their smallest symbol."""
        lo = min(self.blocks[b])
        return sum(1 for other in self.blocks if min(other) < lo)

    def subset_code(self, b: int) -> int:
        return sum(1 << q for q in self.blocks[b])

    def __len__(self) -> int:
        return len(self.blocks)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QueryPartition)
            and self.ell == other.ell
            and set(self.blocks) == set(other.blocks)
        )

    def __hash__(self) -> int:
        return hash((self.ell, frozenset(self.blocks)))

    def __repr__(self) -> str:
        inner = ", ".join("{" + ",".join(map(str, sorted(b))) + "}" for b in self.blocks)
        return f"QueryPartition([{inner}], ell={self.ell})"


@dataclass(frozen=True)
class Query:
    """One internal vertex as seen by the program: index, partition, colors."""

    index: int
    partition: QueryPartition
    colors: tuple[str, ...]

    @classmethod
    def of(cls, index: int, blocks, colors, ell: int) -> "Query":
        return cls(index, QueryPartition(blocks, ell), tuple(colors))

    def black_blocks(self) -> list[int]:
        return [b for b, c in enumerate(self.colors) if c == BLACK]


@dataclass(frozen=True)
class VertexId:
    """Canonical vertex name: the ``(query index, sorted block)`` prefix from the root."""

    prefix: tuple[tuple[int, tuple[int, ...]], ...] = ()

    @property
    def depth(self) -> int:
        return len(self.prefix)

    def child(self, index: int, block: Iterable[int]) -> "VertexId":
        return VertexId(self.prefix + ((index, tuple(sorted(block))),))

    def __repr__(self) -> str:
        if not self.prefix:
            return "VertexId(root)"
        path = " ".join(f"{j}:{{{','.join(map(str, b))}}}" for j, b in self.prefix)
        return f"VertexId({path})"


ROOT = VertexId()


@dataclass(frozen=True)
class TranscriptStep:
    vertex: VertexId
    query: int
    value: int
    block_index: int
    partition: QueryPartition
    colors: tuple[str, ...]
    reds_before: int

    @property
    def block(self) -> frozenset[int]:
        return self.partition.blocks[self.block_index]

    @property
    def color(self) -> str:
        return self.colors[self.block_index]


@dataclass(frozen=True)
class Transcript:
    steps: tuple[TranscriptStep, ...]
    leaf_label: Hashable
    leaf: VertexId

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def colors(self) -> tuple[str, ...]:
        return tuple(s.color for s in self.steps)

    @property
    def queries(self) -> tuple[int, ...]:
        return tuple(s.query for s in self.steps)

    @property
    def reds(self) -> int:
        return sum(1 for s in self.steps if s.color == RED)


@dataclass(frozen=True)
class Step:
    """State-machine view of an internal vertex: its query and one child per block."""

    query: Query
    children: tuple[tuple[int, ...], ...]


class TreeProgram(ABC):
    """A generalized decision tree over ``[ell]^n`` with a G-coloring.

    Subclasses implement :meth:`program`.  States of the implicit state machine
    are tuples of block indices taken from the root.
    """

    query_once: bool = True

    def __init__(self, n: int, ell: int, name: str = ""):
        if n < 1 or ell < 1:
            raise ValueError("n and ell must be positive")
        self.n = n
        self.ell = ell
        self.name = name or type(self).__name__

    @abstractmethod
    def program(self) -> Program:
        """Fresh generator for one run of the tree."""

    @property
    def default_budget(self) -> int:
        return 4 * self.n * self.ell + 16

    def root(self) -> tuple[int, ...]:
        return ()

    def _replay(self, state: Sequence[int]):
        gen = self.program()
        try:
            q = next(gen)
            for b in state:
                q = gen.send(b)
        except StopIteration as stop:
            return None, stop.value
        return q, None

    def is_leaf(self, state: Sequence[int]) -> bool:
        q, _ = self._replay(state)
        return q is None

    def step(self, state: Sequence[int]) -> Step:
        q, _ = self._replay(state)
        if q is None:
            raise ValueError("step() called on a leaf state")
        state = tuple(state)
        return Step(q, tuple(state + (b,) for b in range(len(q.partition))))

    def leaf_output(self, state: Sequence[int]) -> Hashable:
        q, label = self._replay(state)
        if q is not None:
            raise ValueError("leaf_output() called on an internal state")
        return label

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} n={self.n} ell={self.ell}>"


class ProgramTree(TreeProgram):
    """Tree whose program is produced by a zero-argument factory."""

    def __init__(self, n: int, ell: int, factory: Callable[[], Program], name: str = "",
                 query_once: bool = True):
        super().__init__(n, ell, name)
        self._factory = factory
        self.query_once = query_once

    def program(self) -> Program:
        return self._factory()


class RecoloredTree(TreeProgram):
    """Same tree, colors replaced by ``recolor(query) -> colors``."""

    def __init__(self, base: TreeProgram, recolor: Callable[[Query], tuple[str, ...]], name: str = ""):
        super().__init__(base.n, base.ell, name or base.name)
        self.base = base
        self.query_once = base.query_once
        self._recolor = recolor

    def program(self) -> Program:
        gen = self.base.program()
        try:
            q = next(gen)
            while True:
                b = yield Query(q.index, q.partition, self._recolor(q))
                q = gen.send(b)
        except StopIteration as stop:
            return stop.value


def evaluate_path(tree: TreeProgram, x: Sequence[int], budget: int | None = None) -> Transcript:
    """Run ``tree`` on ``x`` and return the root-to-leaf transcript."""
    x = tuple(x)
    if len(x) != tree.n:
        raise ValueError(f"input has length {len(x)}, expected {tree.n}")
    if any(not 0 <= v < tree.ell for v in x):
        raise ValueError(f"input {x} has a coordinate outside [0, {tree.ell})")
    budget = tree.default_budget if budget is None else budget
    gen = tree.program()
    steps: list[TranscriptStep] = []
    seen: set[int] = set()
    vertex = ROOT
    reds = 0
    try:
        q = next(gen)
        while True:
            if len(steps) >= budget:
                gen.close()
                raise StepBudgetExceeded(f"no leaf reached within {budget} steps on {x}")
            if not isinstance(q, Query):
                raise TreeError(f"program yielded {q!r}, expected a Query")
            if not 1 <= q.index <= tree.n:
                raise TreeError(f"query index {q.index} outside 1..{tree.n}")
            if q.partition.ell != tree.ell:
                raise PartitionError(f"partition over [{q.partition.ell}] in a tree over [{tree.ell}]")
            if len(q.colors) != len(q.partition) or any(c not in COLORS for c in q.colors):
                raise TreeError(f"bad colors {q.colors!r} for {len(q.partition)} blocks")
            if tree.query_once and q.index in seen:
                raise RepeatedQueryError(f"index {q.index} queried twice on {x}")
            seen.add(q.index)
            value = x[q.index - 1]
            b = q.partition.block_of(value)
            step = TranscriptStep(vertex, q.index, value, b, q.partition, q.colors, reds)
            steps.append(step)
            if q.colors[b] == RED:
                reds += 1
            vertex = vertex.child(q.index, q.partition.blocks[b])
            q = gen.send(b)
    except StopIteration as stop:
        return Transcript(tuple(steps), stop.value, vertex)


def divergence_vertex(tree: TreeProgram, x: Sequence[int], y: Sequence[int],
                      budget: int | None = None) -> tuple[VertexId, int] | None:
    """First vertex where ``x`` and ``y`` leave through different blocks, with its query index."""
    tx = evaluate_path(tree, x, budget)
    ty = evaluate_path(tree, y, budget)
    return divergence_of(tx, ty)


def divergence_of(tx: Transcript, ty: Transcript) -> tuple[VertexId, int] | None:
    for sx, sy in zip(tx.steps, ty.steps):
        # same prefix so far, hence the same vertex and query
        if sx.block_index != sy.block_index:
            return sx.vertex, sx.query
    return None


class FunctionSpec:
    """A finite function ``f: D -> labels`` with ``D`` a subset of ``[ell]^n``.

    Labels may be any hashable value; ``m`` is the declared output alphabet
    size, defaulting to the number of distinct labels on the domain.
    """

    def __init__(self, n: int, ell: int, domain: Iterable[Sequence[int]],
                 evaluate: Callable[[Input], Hashable], m: int | None = None, name: str = ""):
        self.n = n
        self.ell = ell
        self.name = name
        self.domain: tuple[Input, ...] = tuple(tuple(x) for x in domain)
        seen: set[Input] = set()
        for x in self.domain:
            if len(x) != n or any(not 0 <= v < ell for v in x):
                raise ValueError(f"domain element {x} is not in [{ell}]^{n}")
            if x in seen:
                raise ValueError(f"domain element {x} listed twice")
            seen.add(x)
        self._table = {x: evaluate(x) for x in self.domain}
        labels = set(self._table.values())
        if m is not None and m < len(labels):
            raise ValueError(f"declared m={m} but the function takes {len(labels)} values")
        self.m = m if m is not None else max(1, len(labels))

    @classmethod
    def from_table(cls, n: int, ell: int, table: dict, m: int | None = None, name: str = ""):
        return cls(n, ell, list(table), lambda x: table[tuple(x)], m=m, name=name)

    def __call__(self, x: Sequence[int]) -> Hashable:
        return self._table[tuple(x)]

    def __contains__(self, x) -> bool:
        return tuple(x) in self._table

    def __len__(self) -> int:
        return len(self.domain)

    def labels(self) -> set:
        return set(self._table.values())

    def restrict(self, inputs: Iterable[Sequence[int]], name: str = "") -> "FunctionSpec":
        return FunctionSpec(self.n, self.ell, inputs, self.__call__, m=self.m,
                            name=name or self.name)

    def __repr__(self) -> str:
        return f"<FunctionSpec {self.name} n={self.n} ell={self.ell} m={self.m} |D|={len(self)}>"


@dataclass
class RandomizedTreeFamily:
    """Randomized algorithm as a list of ``(seed label, tree)`` members."""

    members: list[tuple[Hashable, TreeProgram]]
    weights: list[Fraction] | None = None
    name: str = ""

    def __post_init__(self):
        if not self.members:
            raise ValueError("a randomized family needs at least one member")
        K = len(self.members)
        if self.weights is None:
            self.weights = [Fraction(1, K)] * K
        elif len(self.weights) != K or any(w <= 0 for w in self.weights):
            raise ValueError("member weights must be positive, one per member")
        elif sum(self.weights) != 1:
            raise ValueError("member weights must sum to 1")
        n, ell = self.members[0][1].n, self.members[0][1].ell
        if any(t.n != n or t.ell != ell for _, t in self.members):
            raise ValueError("all members must share n and ell")

    @property
    def K(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return self.members[0][1].n

    @property
    def ell(self) -> int:
        return self.members[0][1].ell

    @property
    def uniform(self) -> bool:
        return len(set(self.weights)) == 1

    def trees(self) -> list[TreeProgram]:
        return [t for _, t in self.members]


@dataclass
class ValidationIssue:
    kind: str
    input: Input | None
    message: str
    vertex: VertexId | None = None


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)
    warnings: list[ValidationIssue] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.issues

    def kinds(self) -> set[str]:
        return {i.kind for i in self.issues}

    def __bool__(self) -> bool:
        # truthy when there is something to report, like a list of issues
        return bool(self.issues)

    def __len__(self) -> int:
        return len(self.issues)


def validate(tree: TreeProgram, fn: FunctionSpec, check_labels: bool = True,
             budget: int | None = None) -> ValidationReport:
    """Check that ``tree`` decides ``fn`` with a valid G-coloring on every domain input.

    With ``check_labels=False`` only the structural properties are checked; this
    is how members of a randomized family are validated.
    """
    report = ValidationReport()
    flagged: set[VertexId] = set()
    single: set[VertexId] = set()
    for x in fn.domain:
        report.checked += 1
        try:
            t = evaluate_path(tree, x, budget)
        except PartitionError as exc:
            report.issues.append(ValidationIssue("partition", x, str(exc)))
            continue
        except RepeatedQueryError as exc:
            report.issues.append(ValidationIssue("query_once", x, str(exc)))
            continue
        except StepBudgetExceeded as exc:
            report.issues.append(ValidationIssue("budget", x, str(exc)))
            continue
        except TreeError as exc:
            report.issues.append(ValidationIssue("malformed", x, str(exc)))
            continue
        for s in t.steps:
            if s.vertex in flagged or s.vertex in single:
                continue
            if sum(1 for c in s.colors if c == BLACK) > 1:
                flagged.add(s.vertex)
                report.issues.append(ValidationIssue(
                    "g_coloring", x, f"G-coloring violation: more than one black block at {s.vertex}",
                    s.vertex))
            elif len(s.partition) == 1:
                single.add(s.vertex)
                report.warnings.append(ValidationIssue(
                    "single_block", x, f"vertex {s.vertex} has a single outgoing block", s.vertex))
        if check_labels and t.leaf_label != fn(x):
            report.issues.append(ValidationIssue(
                "label", x, f"does not decide f: leaf label {t.leaf_label!r} != f(x) = {fn(x)!r}"))
    if report.warnings:
        first = report.warnings[0]
        more = len(report.warnings) - 1
        warnings.warn(first.message + (f" (and {more} more such vertices)" if more else ""),
                      stacklevel=2)
    return report
