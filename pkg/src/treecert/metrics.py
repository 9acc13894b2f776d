"""Depth, red counts and per-generation black counts of colored trees."""

from __future__ import annotations

from collections.abc import Hashable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import (
    BLACK,
    RED,
    FunctionSpec,
    Input,
    Query,
    RandomizedTreeFamily,
    RecoloredTree,
    Transcript,
    TreeProgram,
    evaluate_path,
)

EXACT_THRESHOLD = 10**6


@dataclass(frozen=True)
class PathStats:
    """Length, number of reds, and black counts between consecutive reds."""

    T: int
    G: int
    segments: tuple[int, ...]

    def __post_init__(self):
        if len(self.segments) != self.G + 1 or self.T != self.G + sum(self.segments):
            raise ValueError(f"inconsistent path stats {self}")

    def segment(self, g: int) -> int:
        return self.segments[g] if g < len(self.segments) else 0


def stats_from_colors(colors: Sequence[str]) -> PathStats:
    segments = [0]
    for c in colors:
        if c == RED:
            segments.append(0)
        elif c == BLACK:
            segments[-1] += 1
        else:
            raise ValueError(f"unknown color {c!r}")
    return PathStats(len(colors), len(segments) - 1, tuple(segments))


def path_stats(t: Transcript) -> PathStats:
    return stats_from_colors(t.colors)


@dataclass
class TreeMetrics:
    T: int
    G: int
    T_g: tuple[int, ...]
    per_input: dict[Input, PathStats]
    argmax_T: Input
    argmax_G: Input

    def row(self) -> dict:
        return {"T": self.T, "G": self.G, "T_g": list(self.T_g)}


def _max_segments(stats: Sequence[PathStats]) -> tuple[int, ...]:
    width = max(len(s.segments) for s in stats)
    return tuple(max(s.segment(g) for s in stats) for g in range(width))


def tree_metrics(tree: TreeProgram, fn: FunctionSpec | Sequence[Sequence[int]],
                 budget: int | None = None) -> TreeMetrics:
    """Maxima of path statistics over the domain of ``fn`` (or an explicit input list)."""
    inputs = fn.domain if isinstance(fn, FunctionSpec) else [tuple(x) for x in fn]
    if not inputs:
        raise ValueError("tree_metrics needs a nonempty domain")
    per_input = {x: path_stats(evaluate_path(tree, x, budget)) for x in inputs}
    stats = list(per_input.values())
    argT = max(per_input, key=lambda x: per_input[x].T)
    argG = max(per_input, key=lambda x: per_input[x].G)
    return TreeMetrics(per_input[argT].T, per_input[argG].G, _max_segments(stats),
                       per_input, argT, argG)


@dataclass
class EnsembleMetrics:
    """Worst-case expectations over the members of a randomized family.

    Values are exact ``Fraction`` objects in exact mode and floats otherwise.
    """

    T: Fraction | float
    G: Fraction | float
    G_max: int
    T_g: tuple
    mode: str
    samples: int | None = None
    seed: int | None = None
    stderr_G: float | None = None
    per_input: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {"T": self.T, "G": self.G, "G_max": self.G_max, "T_g": list(self.T_g),
                "mode": self.mode, "seed": self.seed}


def member_stats(family: RandomizedTreeFamily, inputs: Sequence[Input],
                 budget: int | None = None) -> list[list[PathStats]]:
    """``stats[k][i]`` is the path statistics of member ``k`` on ``inputs[i]``."""
    return [[path_stats(evaluate_path(t, x, budget)) for x in inputs] for t in family.trees()]


def ensemble_metrics(family: RandomizedTreeFamily, fn: FunctionSpec | Sequence[Sequence[int]],
                     mode: str = "exact", samples: int = 1000, seed: int = 0,
                     budget: int | None = None) -> EnsembleMetrics:
    """Expected path statistics, maximized over inputs.

    ``mode="exact"`` averages over every member with the family weights.
    ``mode="monte_carlo"`` draws ``samples`` members with replacement from the
    family distribution using ``numpy.random.default_rng(seed)``.
    """
    inputs = list(fn.domain if isinstance(fn, FunctionSpec) else [tuple(x) for x in fn])
    if not inputs:
        raise ValueError("ensemble_metrics needs a nonempty domain")
    if mode == "exact":
        stats = member_stats(family, inputs, budget)
        weights = list(family.weights)
        max_T = max(s.T for row in stats for s in row)
        exact = family.K * max(max_T, 1) <= EXACT_THRESHOLD
        if not exact:
            weights = [float(w) for w in weights]
        return _reduce(stats, weights, inputs, "exact", None, None, exact)
    if mode == "monte_carlo":
        if samples < 1:
            raise ValueError("monte_carlo mode needs at least one sample")
        rng = np.random.default_rng(seed)
        probs = np.array([float(w) for w in family.weights])
        picks = rng.choice(family.K, size=samples, p=probs / probs.sum())
        trees = family.trees()
        stats = [[path_stats(evaluate_path(trees[k], x, budget)) for x in inputs] for k in picks]
        metrics = _reduce(stats, [1.0 / samples] * samples, inputs, "monte_carlo", samples, seed,
                          exact=False)
        g = np.array([[s.G for s in row] for row in stats], dtype=float)
        worst = max(range(len(inputs)), key=lambda i: g[:, i].mean())
        metrics.stderr_G = float(g[:, worst].std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
        return metrics
    raise ValueError(f"unknown mode {mode!r}")


def _reduce(stats, weights, inputs, mode, samples, seed, exact: bool) -> EnsembleMetrics:
    zero = Fraction(0) if exact else 0.0
    width = max(len(s.segments) for row in stats for s in row)
    per_input = {}
    best_T = best_G = None
    best_Tg = [None] * width
    for i, x in enumerate(inputs):
        eT, eG = zero, zero
        eTg = [zero] * width
        for w, row in zip(weights, stats):
            s = row[i]
            eT += w * s.T
            eG += w * s.G
            for g in range(width):
                eTg[g] += w * s.segment(g)
        per_input[x] = (eT, eG, tuple(eTg))
        best_T = eT if best_T is None else max(best_T, eT)
        best_G = eG if best_G is None else max(best_G, eG)
        best_Tg = [v if b is None else max(b, v) for b, v in zip(best_Tg, eTg)]
    G_max = max(s.G for row in stats for s in row)
    return EnsembleMetrics(best_T, best_G, G_max, tuple(best_Tg), mode, samples, seed,
                           per_input=per_input)


def auto_color_fixed_guess(tree: TreeProgram, q0: int) -> RecoloredTree:
    """Color the block containing ``q0`` black and every other block red."""
    if not 0 <= q0 < tree.ell:
        raise ValueError(f"guess {q0} outside [0, {tree.ell})")

    def recolor(q: Query) -> tuple[str, ...]:
        b = q.partition.block_of(q0)
        return tuple(BLACK if i == b else RED for i in range(len(q.partition)))

    return RecoloredTree(tree, recolor, name=f"{tree.name}[guess={q0}]")


def sparse_g(fn: FunctionSpec) -> tuple[int, int]:
    """Symbol minimizing the worst count of coordinates that differ from it."""
    if not fn.domain:
        raise ValueError("sparse_g needs a nonempty domain")
    best: tuple[int, int] | None = None
    for q in range(fn.ell):
        worst = max(sum(1 for v in x if v != q) for x in fn.domain)
        if best is None or worst < best[1]:
            best = (q, worst)
    return best


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, t) for t in range(1, n + 1)), Fraction(0))


def label_index(labels: Sequence[Hashable]) -> dict:
    """First-seen index of each distinct label."""
    index: dict = {}
    for lab in labels:
        if lab not in index:
            index[lab] = len(index)
    return index
