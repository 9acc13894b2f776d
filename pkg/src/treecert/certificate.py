"""Explicit feasible points of the dual adversary program built from colored trees.

For an input ``x`` and a path vertex ``v`` that queries index ``j``, the vector
``u_xj`` lives in the ``(v, color of x's block)`` slot and carries
``1/sqrt(W)`` times ``mu[x's block] (x) mu~[label]``.  The vector ``w_xj`` has one
``sqrt(W_c)`` term for every color ``c`` used by the *other* blocks at ``v``,
tensored with ``nu[x's block] (x) nu~[label]``.  Two inputs only meet with
different blocks at the vertex where their paths split, which is why every
constraint reduces to one closed-form term.
"""

from __future__ import annotations

import math
import random
import warnings
from abc import ABC, abstractmethod
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .family import cross_family
from .metrics import PathStats, label_index, path_stats, tree_metrics
from .model import (
    BLACK,
    RED,
    FunctionSpec,
    Input,
    Transcript,
    TranscriptStep,
    TreeProgram,
    VertexId,
    divergence_of,
    evaluate_path,
    validate,
)

FAMILY_MODES = ("per-vertex", "paper")
DENSE_CAP = 256


class CertificateError(Exception):
    """A certificate could not be built or checked."""


# ---------------------------------------------------------------- weights

class WeightSchedule(ABC):
    """Positive edge weights ``(W_black, W_red)`` at each vertex.

    ``symbol`` names each weight as ``value(key) ** exponent`` so that span
    program identities can be checked without rounding.
    """

    @abstractmethod
    def at(self, vertex: VertexId, g: int) -> tuple[float, float]:
        """Weights at ``vertex``; ``g`` is the number of reds above it."""

    @abstractmethod
    def symbol(self, vertex: VertexId, g: int, color: str) -> tuple[Hashable, int]:
        """``(key, exponent)`` such that the weight equals ``value(key) ** exponent``."""

    @abstractmethod
    def value(self, key: Hashable) -> float:
        ...

    @abstractmethod
    def describe(self) -> str:
        ...

    def weight(self, vertex: VertexId, g: int, color: str) -> float:
        b, r = self.at(vertex, g)
        return b if color == BLACK else r


def _positive(*ws: float) -> None:
    for w in ws:
        if not (w > 0 and math.isfinite(w)):
            raise ValueError(f"weights must be positive and finite, got {w}")


@dataclass(frozen=True)
class ConstantWeights(WeightSchedule):
    black: float
    red: float

    def __post_init__(self):
        _positive(self.black, self.red)

    def at(self, vertex, g):
        return self.black, self.red

    def symbol(self, vertex, g, color):
        return color, 1

    def value(self, key):
        return self.black if key == BLACK else self.red

    def describe(self) -> str:
        return f"constant(black={self.black:.6g},red={self.red:.6g})"


@dataclass(frozen=True)
class GenerationWeights(WeightSchedule):
    """``W_black = W_g`` and ``W_red = 1/W_g`` where ``g`` counts reds above the vertex."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("a generation schedule needs at least one weight")
        _positive(*self.values)

    def _get(self, g: int) -> float:
        if g >= len(self.values):
            raise CertificateError(f"generation schedule has no weight for g={g}")
        return self.values[g]

    def at(self, vertex, g):
        w = self._get(g)
        return w, 1.0 / w

    def symbol(self, vertex, g, color):
        self._get(g)
        return ("g", g), (1 if color == BLACK else -1)

    def value(self, key):
        return self.values[key[1]]

    def describe(self) -> str:
        return "generation(" + ",".join(f"{w:.6g}" for w in self.values) + ")"


@dataclass(frozen=True)
class VertexWeights(WeightSchedule):
    """Independent ``(W_black, W_red)`` for each vertex, with an optional fallback."""

    table: Mapping[VertexId, tuple[float, float]]
    default: tuple[float, float] | None = None

    def __post_init__(self):
        for b, r in self.table.values():
            _positive(b, r)
        if self.default is not None:
            _positive(*self.default)

    def at(self, vertex, g):
        try:
            return self.table[vertex]
        except KeyError:
            if self.default is None:
                raise CertificateError(f"no weight for vertex {vertex}") from None
            return self.default

    def symbol(self, vertex, g, color):
        self.at(vertex, g)
        key = vertex if vertex in self.table else None
        return (key, color), 1

    def value(self, key):
        vertex, color = key
        pair = self.default if vertex is None else self.table[vertex]
        return pair[0] if color == BLACK else pair[1]

    def describe(self) -> str:
        return f"per-vertex({len(self.table)} vertices)"

    def balanced(self) -> "VertexWeights":
        """Replace each pair by ``(s, 1/s)`` with ``s = sqrt(W_black / W_red)``."""
        def fix(pair):
            s = math.sqrt(pair[0] / pair[1])
            return s, 1.0 / s
        default = None if self.default is None else fix(self.default)
        return VertexWeights({v: fix(p) for v, p in self.table.items()}, default)


def default_weights(T: float, G: float) -> ConstantWeights:
    """``W_black = sqrt(T/G)`` and ``W_red = sqrt(G/T)``; red-free trees get ``(1, 1)``."""
    if G <= 0 or T <= 0:
        warnings.warn("no red edges: using unit weights", stacklevel=2)
        return ConstantWeights(1.0, 1.0)
    if G > T:
        raise ValueError(f"G={G} cannot exceed T={T}")
    return ConstantWeights(math.sqrt(T / G), math.sqrt(G / T))


def generation_weights(T_g: Sequence[float]) -> GenerationWeights:
    """``W_0 = T_0`` and ``W_g = sqrt(T_g)`` for ``g >= 1``.

    A zero ``T_0`` gets weight 1 since its term vanishes.  Zero counts after the
    last nonzero generation (trees that halt on a red) also get weight 1; a zero
    count followed by a nonzero one is rejected.
    """
    T_g = [float(t) for t in T_g]
    if not T_g or any(t < 0 for t in T_g):
        raise ValueError(f"invalid generation counts {T_g}")
    last = max((g for g, t in enumerate(T_g) if t > 0), default=0)
    values = [T_g[0] if T_g[0] > 0 else 1.0]
    for g in range(1, len(T_g)):
        if T_g[g] > 0:
            values.append(math.sqrt(T_g[g]))
        elif g > last:
            values.append(1.0)
        else:
            raise ValueError(f"generation {g} has no black edges but later generations do")
    return GenerationWeights(tuple(values))


# ---------------------------------------------------------------- structured vectors

@dataclass(frozen=True)
class Component:
    """One vertex slot of a structured vector."""

    vertex: VertexId
    terms: tuple[tuple[str, float], ...]
    block: int
    block_size: int
    label: int
    label_size: int


@dataclass(frozen=True)
class StructuredVector:
    role: str
    components: tuple[Component, ...] = ()

    @property
    def is_zero(self) -> bool:
        return not self.components

    def norm_sq(self) -> float:
        total = 0.0
        for c in self.components:
            fam = cross_family(c.block_size).norm_sq() * cross_family(c.label_size).norm_sq()
            total += sum(coef * coef for _, coef in c.terms) * fam
        return total

    def inner(self, other: "StructuredVector") -> float:
        """``<self|other>`` with ``self`` a u-vector and ``other`` a w-vector."""
        if self.role != "u" or other.role != "w":
            raise ValueError("inner() pairs a u-vector with a w-vector")
        total = 0.0
        for a in self.components:
            for b in other.components:
                if a.vertex != b.vertex:
                    continue
                overlap = sum(ca * cb for col_a, ca in a.terms for col_b, cb in b.terms
                              if col_a == col_b)
                if overlap:
                    total += (overlap * cross_family(a.block_size).cross_inner(a.block, b.block)
                              * cross_family(a.label_size).cross_inner(a.label, b.label))
        return total


def other_colors(step: TranscriptStep) -> set[str]:
    """Colors of the blocks at the step's vertex other than the one taken."""
    return {c for b, c in enumerate(step.colors) if b != step.block_index}


# ---------------------------------------------------------------- certificate

@dataclass
class FeasibilityReport:
    pairs: int
    residual: float
    worst_pair: tuple[Input, Input] | None
    mode: str
    tolerance: float = 1e-9

    @property
    def ok(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class ObjectiveReport:
    value: float
    u_max: float
    w_max: float
    per_input: dict[Input, tuple[float, float]]
    argmax: Input


class Certificate:
    """Feasible point of the adversary program for one colored tree.

    ``labels`` fixes the output indexing; by default it is the first-seen order
    of leaf labels and function values over ``inputs``.
    """

    def __init__(self, tree: TreeProgram, weights: WeightSchedule, fn: FunctionSpec,
                 family: str = "per-vertex", inputs: Sequence[Sequence[int]] | None = None,
                 labels: Mapping[Hashable, int] | None = None, m: int | None = None,
                 budget: int | None = None):
        if family not in FAMILY_MODES:
            raise ValueError(f"family mode must be one of {FAMILY_MODES}, got {family!r}")
        self.tree = tree
        self.weights = weights
        self.fn = fn
        self.family = family
        self.budget = budget
        self.inputs: tuple[Input, ...] = tuple(tuple(x) for x in (fn.domain if inputs is None else inputs))
        self._transcripts: dict[Input, Transcript] = {}
        if labels is None:
            seen = [fn(x) for x in self.inputs] + [self.transcript(x).leaf_label for x in self.inputs]
            labels = label_index(seen)
        self.labels = dict(labels)
        self.m = max(m or 0, fn.m, len(self.labels), 1)
        self._table = None

    # --- paths

    def transcript(self, x: Sequence[int]) -> Transcript:
        x = tuple(x)
        t = self._transcripts.get(x)
        if t is None:
            t = evaluate_path(self.tree, x, self.budget)
            self._transcripts[x] = t
        return t

    def label_of(self, x: Sequence[int]) -> int:
        lab = self.transcript(x).leaf_label
        if lab not in self.labels:
            raise CertificateError(f"leaf label {lab!r} missing from the label index")
        return self.labels[lab]

    def block_coordinates(self, step: TranscriptStep) -> tuple[int, int]:
        """(family index, family size) of the taken block."""
        if self.family == "paper":
            return step.partition.subset_code(step.block_index), 2 ** self.tree.ell
        return step.partition.canonical_rank(step.block_index), len(step.partition)

    def step_coefficients(self, step: TranscriptStep) -> tuple[float, float, float]:
        """(u coefficient, w black coefficient, w red coefficient) at one path step."""
        b, r = self.weights.at(step.vertex, step.reds_before)
        u = 1.0 / math.sqrt(b if step.color == BLACK else r)
        others = other_colors(step)
        wb = math.sqrt(b) if BLACK in others else 0.0
        wr = math.sqrt(r) if RED in others else 0.0
        return u, wb, wr

    # --- vectors

    def _components(self, x, j, role: str) -> tuple[Component, ...]:
        comps = []
        lab = self.label_of(x)
        for step in self.transcript(x).steps:
            if step.query != j:
                continue
            block, size = self.block_coordinates(step)
            u, wb, wr = self.step_coefficients(step)
            if role == "u":
                terms = ((step.color, u),)
            else:
                terms = tuple((c, v) for c, v in ((BLACK, wb), (RED, wr)) if v)
            comps.append(Component(step.vertex, terms, block, size, lab, self.m))
        return tuple(comps)

    def build_u(self, x: Sequence[int], j: int) -> StructuredVector:
        return StructuredVector("u", self._components(x, j, "u"))

    def build_w(self, x: Sequence[int], j: int) -> StructuredVector:
        return StructuredVector("w", self._components(x, j, "w"))

    # --- constraints

    def pair_sum(self, x: Sequence[int], y: Sequence[int]) -> float:
        """Closed form: the single term at the vertex where the two paths split."""
        tx, ty = self.transcript(x), self.transcript(y)
        split = divergence_of(tx, ty)
        if split is None:
            return 0.0
        t = next(i for i, (a, b) in enumerate(zip(tx.steps, ty.steps)) if a.block_index != b.block_index)
        sx, sy = tx.steps[t], ty.steps[t]
        u, _, _ = self.step_coefficients(sx)
        _, wb, wr = self.step_coefficients(sy)
        w = wb if sx.color == BLACK else wr
        bx, size = self.block_coordinates(sx)
        by, _ = self.block_coordinates(sy)
        return (u * w * cross_family(size).cross_inner(bx, by)
                * cross_family(self.m).cross_inner(self.label_of(x), self.label_of(y)))

    def pair_sum_structured(self, x: Sequence[int], y: Sequence[int]) -> float:
        """Literal sum over differing coordinates of ``<u_xj|w_yj>``."""
        return sum(self.build_u(x, j).inner(self.build_w(y, j))
                   for j in range(1, self.tree.n + 1) if x[j - 1] != y[j - 1])

    def target(self, x: Sequence[int], y: Sequence[int]) -> float:
        return 0.0 if self.fn(x) == self.fn(y) else 1.0

    # --- norms

    def norm_sums(self, x: Sequence[int]) -> tuple[float, float]:
        """``(sum_j |u_xj|^2, sum_j |w_xj|^2)`` from path statistics."""
        out = cross_family(self.m).norm_sq()
        su = sw = 0.0
        for step in self.transcript(x).steps:
            _, size = self.block_coordinates(step)
            fam = cross_family(size).norm_sq() * out
            u, wb, wr = self.step_coefficients(step)
            su += u * u * fam
            sw += (wb * wb + wr * wr) * fam
        return su, sw

    def objective(self) -> ObjectiveReport:
        per = {x: self.norm_sums(x) for x in self.inputs}
        if not per:
            raise CertificateError("objective of an empty domain")
        arg = max(per, key=lambda x: max(per[x]))
        return ObjectiveReport(max(per[arg]), max(p[0] for p in per.values()),
                               max(p[1] for p in per.values()), per, arg)

    # --- vectorized tables

    def path_table(self) -> "PathTable":
        if self._table is None:
            self._table = PathTable.build(self)
        return self._table

    def visited_vertices(self) -> list[VertexId]:
        seen: dict[VertexId, None] = {}
        for x in self.inputs:
            for s in self.transcript(x).steps:
                seen.setdefault(s.vertex)
        return list(seen)


@dataclass
class PathTable:
    """Per-input, per-step arrays used for batch pair checks."""

    blocks: np.ndarray
    famidx: np.ndarray
    famsize: np.ndarray
    color_black: np.ndarray
    ucoef: np.ndarray
    wblack: np.ndarray
    wred: np.ndarray
    leaf: np.ndarray
    fvalue: np.ndarray
    m: int

    @classmethod
    def build(cls, cert: Certificate) -> "PathTable":
        D = len(cert.inputs)
        L = max((len(cert.transcript(x)) for x in cert.inputs), default=0)
        L = max(L, 1)
        blocks = np.full((D, L), -1, dtype=np.int64)
        famidx = np.zeros((D, L), dtype=np.int64)
        famsize = np.ones((D, L), dtype=np.int64)
        black = np.zeros((D, L), dtype=bool)
        ucoef = np.zeros((D, L))
        wblack = np.zeros((D, L))
        wred = np.zeros((D, L))
        fvals = label_index([cert.fn(x) for x in cert.inputs])
        leaf = np.array([cert.label_of(x) for x in cert.inputs], dtype=np.int64)
        fvalue = np.array([fvals[cert.fn(x)] for x in cert.inputs], dtype=np.int64)
        for i, x in enumerate(cert.inputs):
            for t, step in enumerate(cert.transcript(x).steps):
                blocks[i, t] = step.block_index
                famidx[i, t], famsize[i, t] = cert.block_coordinates(step)
                black[i, t] = step.color == BLACK
                ucoef[i, t], wblack[i, t], wred[i, t] = cert.step_coefficients(step)
        return cls(blocks, famidx, famsize, black, ucoef, wblack, wred, leaf, fvalue, cert.m)

    def pair_block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Matrix of closed-form pair sums for ``rows x cols``."""
        B = self.blocks
        mism = B[rows][:, None, :] != B[cols][None, :, :]
        has = mism.any(axis=2)
        t = mism.argmax(axis=2)
        r = rows[:, None]
        c = cols[None, :]
        u = self.ucoef[r, t]
        w = np.where(self.color_black[r, t], self.wblack[c, t], self.wred[c, t])
        size = self.famsize[r, t]
        fam = ((self.famidx[r, t] != self.famidx[c, t]) & (size >= 2)).astype(float)
        out = ((self.leaf[r] != self.leaf[c]) & (self.m >= 2)).astype(float)
        return np.where(has, u * w * fam * out, 0.0)

    def target_block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        return (self.fvalue[rows][:, None] != self.fvalue[cols][None, :]).astype(float)


def _chunks(D: int, L: int, budget: int = 4_000_000):
    step = max(1, budget // max(1, D * L))
    for a in range(0, D, step):
        yield np.arange(a, min(D, a + step))


def verify_feasibility(tree: TreeProgram, weights: WeightSchedule, fn: FunctionSpec,
                       mode: str = "exhaustive", samples: int = 10_000, seed: int = 0,
                       family: str = "per-vertex", tolerance: float = 1e-9,
                       check: bool = True, cert: Certificate | None = None) -> FeasibilityReport:
    """Maximum constraint residual over ordered domain pairs.

    ``mode`` is ``"exhaustive"`` or ``"sampled"``; sampled mode draws ``samples``
    ordered pairs with ``random.Random(seed)``.
    """
    if check:
        report = validate(tree, fn)
        if not report.ok:
            raise CertificateError("tree does not validate: " + report.issues[0].message)
    cert = cert or Certificate(tree, weights, fn, family=family)
    table = cert.path_table()
    D = len(cert.inputs)
    if D == 0:
        return FeasibilityReport(0, 0.0, None, mode, tolerance)
    worst, where = 0.0, None
    if mode == "exhaustive":
        cols = np.arange(D)
        for rows in _chunks(D, table.blocks.shape[1]):
            res = np.abs(table.pair_block(rows, cols) - table.target_block(rows, cols))
            k = int(res.argmax())
            if res.flat[k] > worst or where is None:
                worst = float(res.flat[k])
                where = (cert.inputs[rows[k // D]], cert.inputs[k % D])
        return FeasibilityReport(D * D, worst, where, "exhaustive", tolerance)
    if mode == "sampled":
        rng = random.Random(seed)
        for _ in range(samples):
            i, k = rng.randrange(D), rng.randrange(D)
            x, y = cert.inputs[i], cert.inputs[k]
            res = abs(cert.pair_sum(x, y) - cert.target(x, y))
            if res > worst or where is None:
                worst, where = res, (x, y)
        return FeasibilityReport(samples, worst, where, f"sampled({seed},{samples})", tolerance)
    raise ValueError(f"unknown verification mode {mode!r}")


def objective(tree: TreeProgram, weights: WeightSchedule, fn: FunctionSpec,
              family: str = "per-vertex") -> ObjectiveReport:
    return Certificate(tree, weights, fn, family=family).objective()


# ---------------------------------------------------------------- bounds

@dataclass
class BoundCheck:
    name: str
    value: float
    bound: float
    asserted: bool = True

    @property
    def slack(self) -> float:
        return self.bound - self.value

    @property
    def ok(self) -> bool:
        return self.slack >= -1e-9 * max(1.0, abs(self.bound))


@dataclass
class BoundReport:
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks if c.asserted)

    def get(self, name: str) -> BoundCheck:
        return next(c for c in self.checks if c.name == name)

    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.asserted and not c.ok]


def _generation_sides(stats: PathStats, values: Sequence[float]) -> tuple[float, float]:
    """Construction-level caps on the two norm sums of one input, before family factors."""
    u = sum(stats.segment(g) / values[g] for g in range(stats.G + 1))
    u += sum(values[g] for g in range(stats.G))
    w = sum(stats.segment(g) / values[g] for g in range(stats.G + 1))
    w += sum(values[g] + 1 / values[g] for g in range(stats.G))
    return u, w


def generation_bound(T_g: Sequence[float], values: Sequence[float]) -> float:
    """``4 (T_0/W_0 + sum_{g>=1} (T_g/W_g + W_g))``."""
    return 4 * (T_g[0] / values[0] + sum(T_g[g] / values[g] + values[g]
                                         for g in range(1, len(T_g))))


def bound_check(tree: TreeProgram, weights: WeightSchedule, fn: FunctionSpec,
                family: str = "per-vertex", cert: Certificate | None = None,
                T_g: Sequence[float] | None = None) -> BoundReport:
    """Compare measured norm sums with the displayed upper bounds.

    Constant schedules are checked against ``4(T/W_black + G/W_red)`` and
    ``4(2 W_red T + W_black G)``.  Generation schedules are checked per input
    against the caps that follow from the construction; the four-term formula
    with the per-generation maxima is recorded but not asserted, because it
    drops the weight of the first red edge.
    """
    cert = cert or Certificate(tree, weights, fn, family=family)
    obj = cert.objective()
    metrics = tree_metrics(tree, cert.inputs)
    report = BoundReport()
    if isinstance(weights, ConstantWeights):
        T, G, b, r = metrics.T, metrics.G, weights.black, weights.red
        report.checks.append(BoundCheck("u_side", obj.u_max, 4 * (T / b + G / r)))
        report.checks.append(BoundCheck("w_side", obj.w_max, 4 * (2 * r * T + b * G)))
        if b * r == 1.0 or math.isclose(b * r, 1.0):
            report.checks.append(BoundCheck("sqrt_GT", obj.value, 12 * math.sqrt(max(G, 1) * T)
                                            if G else 8 * T))
    elif isinstance(weights, GenerationWeights):
        worst_u = worst_w = 0.0
        worst_formula = math.inf
        for x in cert.inputs:
            stats = metrics.per_input[x]
            su, sw = obj.per_input[x]
            cu, cw = _generation_sides(stats, weights.values)
            worst_u = max(worst_u, su - 4 * cu)
            worst_w = max(worst_w, sw - 4 * cw)
            per_x = generation_bound([stats.segment(g) for g in range(len(weights.values))],
                                           weights.values)
            worst_formula = min(worst_formula, per_x - max(su, sw))
        report.checks.append(BoundCheck("u_generation", worst_u, 0.0))
        report.checks.append(BoundCheck("w_generation", worst_w, 0.0))
        report.checks.append(BoundCheck("generation_per_input", -worst_formula, 0.0, asserted=False))
        tg = list(T_g) if T_g is not None else list(metrics.T_g)
        tg += [0] * (len(weights.values) - len(tg))
        report.checks.append(BoundCheck("generation_formula", obj.value,
                                        generation_bound(tg, weights.values), asserted=False))
        report.checks.append(BoundCheck("sum_sqrt_Tg", obj.value,
                                        4 + 8 * sum(math.sqrt(t) for t in tg[1:]), asserted=False))
    return report


# ---------------------------------------------------------------- dense oracle

@dataclass
class DenseResult:
    residual: float
    objective: float
    dimension: int
    pair_sums: np.ndarray
    norms: np.ndarray


def dense_oracle(tree: TreeProgram, weights: WeightSchedule, fn: FunctionSpec,
                 family: str = "per-vertex", cap: int = DENSE_CAP,
                 vertex_cap: int = 4096, dim_cap: int = 200_000) -> DenseResult:
    """Materialize every ``u_xj`` and ``w_xj`` and evaluate the program literally."""
    if len(fn.domain) > cap:
        raise CertificateError(f"domain size {len(fn.domain)} exceeds the dense cap {cap}")
    cert = Certificate(tree, weights, fn, family=family)
    D, n, m = len(cert.inputs), tree.n, cert.m
    out = cross_family(m)
    mu_out, nu_out = out.mu_matrix(), out.nu_matrix()

    # one slot of size N_v * m per (vertex, color)
    offsets: dict[tuple[VertexId, str], int] = {}
    dim = 0
    for x in cert.inputs:
        for step in cert.transcript(x).steps:
            _, size = cert.block_coordinates(step)
            for color in (BLACK, RED):
                if (step.vertex, color) not in offsets:
                    offsets[(step.vertex, color)] = dim
                    dim += size * m
    if len(offsets) > 2 * vertex_cap:
        raise CertificateError(f"more than {vertex_cap} visited vertices")
    if dim > dim_cap:
        raise CertificateError(f"dense dimension {dim} exceeds {dim_cap}")

    U = np.zeros((n, D, max(dim, 1)))
    Wm = np.zeros((n, D, max(dim, 1)))
    for i, x in enumerate(cert.inputs):
        lab = cert.label_of(x)
        for step in cert.transcript(x).steps:
            b, size = cert.block_coordinates(step)
            fam = cross_family(size)
            Wb, Wr = weights.at(step.vertex, step.reds_before)
            Wc = {BLACK: Wb, RED: Wr}
            j = step.query - 1
            off = offsets[(step.vertex, step.color)]
            U[j, i, off:off + size * m] += np.kron(fam.mu(b), mu_out[lab]) / math.sqrt(Wc[step.color])
            for color in other_colors(step):
                off = offsets[(step.vertex, color)]
                Wm[j, i, off:off + size * m] += math.sqrt(Wc[color]) * np.kron(fam.nu(b), nu_out[lab])

    X = np.array(cert.inputs, dtype=np.int64).reshape(D, n)
    S = np.zeros((D, D))
    for j in range(n):
        mask = X[:, j][:, None] != X[:, j][None, :]
        S += mask * (U[j] @ Wm[j].T)
    fv = [fn(x) for x in cert.inputs]
    target = np.array([[0.0 if a == b else 1.0 for b in fv] for a in fv])
    norms = np.stack([(U ** 2).sum(axis=(0, 2)), (Wm ** 2).sum(axis=(0, 2))], axis=1)
    return DenseResult(float(np.abs(S - target).max()) if D else 0.0,
                       float(norms.max()) if D else 0.0, dim, S, norms)


# ---------------------------------------------------------------- per-vertex weights

@dataclass
class PerVertexAnalysis:
    M_plus: dict[Input, float]
    M_minus: dict[Input, float]
    bound: float
    balanced_bound: float
    balanced: VertexWeights

    @property
    def improved(self) -> bool:
        return self.balanced_bound <= self.bound * (1 + 1e-12)


def _m_tables(cert: Certificate, weights: WeightSchedule) -> tuple[dict, dict]:
    plus, minus = {}, {}
    for x in cert.inputs:
        p = q = 0.0
        for step in cert.transcript(x).steps:
            b, r = weights.at(step.vertex, step.reds_before)
            if step.color == BLACK:
                p += 1 / b
                q += r
            else:
                p += 1 / r
                q += b
        plus[x], minus[x] = p, q
    return plus, minus


def per_vertex_analysis(tree: TreeProgram, fn: FunctionSpec,
                        weights: VertexWeights) -> PerVertexAnalysis:
    """``M_x^+``, ``M_x^-``, the bound ``max sqrt(M_x^+ M_y^-)`` and its balanced version."""
    cert = Certificate(tree, weights, fn)
    plus, minus = _m_tables(cert, weights)
    bound = math.sqrt(max(plus.values()) * max(minus.values()))
    balanced = weights.balanced()
    bp, bm = _m_tables(cert, balanced)
    return PerVertexAnalysis(plus, minus, bound,
                             math.sqrt(max(bp.values()) * max(bm.values())), balanced)


def random_vertex_weights(tree: TreeProgram, fn: FunctionSpec, seed: int = 0,
                          low: float = 0.1, high: float = 10.0) -> VertexWeights:
    """Independent log-uniform weights on every vertex visited by the domain."""
    rng = random.Random(seed)
    cert = Certificate(tree, ConstantWeights(1.0, 1.0), fn)
    lo, hi = math.log(low), math.log(high)
    return VertexWeights({v: (math.exp(rng.uniform(lo, hi)), math.exp(rng.uniform(lo, hi)))
                          for v in cert.visited_vertices()})


def schedule_from_document(doc: Mapping) -> WeightSchedule:
    """Weight schedule from a parsed document.

    Accepted shapes: ``{"constant": [black, red]}``, ``{"generation": [W_0, ...]}``
    and ``{"per_vertex": [{"prefix": [[j, [block]], ...], "black": b, "red": r}, ...],
    "default": [b, r]}``.
    """
    if "constant" in doc:
        b, r = doc["constant"]
        return ConstantWeights(float(b), float(r))
    if "generation" in doc:
        return GenerationWeights(tuple(float(w) for w in doc["generation"]))
    if "per_vertex" in doc:
        table = {}
        for entry in doc["per_vertex"]:
            vid = VertexId(tuple((int(j), tuple(sorted(int(q) for q in blk)))
                                 for j, blk in entry["prefix"]))
            table[vid] = (float(entry["black"]), float(entry["red"]))
        default = tuple(float(v) for v in doc["default"]) if "default" in doc else None
        return VertexWeights(table, default)
    raise ValueError("weight document needs one of 'constant', 'generation', 'per_vertex'")
