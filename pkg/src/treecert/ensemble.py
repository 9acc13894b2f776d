"""State-generation certificates for randomized tree families.

Each member ``zeta`` gets its own adversary certificate; the combined vectors
are the member vectors stacked blockwise with scale ``sqrt(p_zeta)``.  The
``zeta`` register is never materialized: every combined inner product is the
weighted sum of member inner products.
"""

from __future__ import annotations

import math
import random
import warnings
from collections.abc import Hashable, Sequence
from dataclasses import dataclass

import numpy as np

from .certificate import (
    Certificate,
    CertificateError,
    FeasibilityReport,
    WeightSchedule,
    _chunks,
    default_weights,
)
from .metrics import EnsembleMetrics, ensemble_metrics, label_index
from .model import FunctionSpec, RandomizedTreeFamily, validate

Input = tuple[int, ...]


def _schedules(family: RandomizedTreeFamily,
               weights: WeightSchedule | Sequence[WeightSchedule]) -> list[WeightSchedule]:
    if isinstance(weights, WeightSchedule):
        return [weights] * family.K
    weights = list(weights)
    if len(weights) != family.K:
        raise ValueError(f"need one weight schedule per member ({family.K}), got {len(weights)}")
    return weights


class EnsembleCertificate:
    """Member certificates sharing one output label index."""

    def __init__(self, family: RandomizedTreeFamily,
                 weights: WeightSchedule | Sequence[WeightSchedule], fn: FunctionSpec,
                 family_mode: str = "per-vertex", inputs: Sequence[Sequence[int]] | None = None):
        self.family = family
        self.fn = fn
        self.inputs: tuple[Input, ...] = tuple(tuple(x) for x in (fn.domain if inputs is None else inputs))
        self.p = [float(w) for w in family.weights]
        schedules = _schedules(family, weights)
        # first pass collects every label any member can output
        probes = [Certificate(t, w, fn, family=family_mode, inputs=self.inputs, labels={None: 0})
                  for t, w in zip(family.trees(), schedules)]
        seen = [fn(x) for x in self.inputs]
        for c in probes:
            seen.extend(c.transcript(x).leaf_label for x in self.inputs)
        self.labels = label_index(seen)
        m = max(fn.m, len(self.labels), 1)
        self.members: list[Certificate] = []
        for probe, w in zip(probes, schedules):
            cert = Certificate(probe.tree, w, fn, family=family_mode, inputs=self.inputs,
                               labels=self.labels, m=m)
            cert._transcripts = probe._transcripts
            self.members.append(cert)

    @property
    def K(self) -> int:
        return self.family.K

    def leaf_label(self, z: int, x: Sequence[int]) -> Hashable:
        return self.members[z].transcript(x).leaf_label

    def gram(self, x: Sequence[int], y: Sequence[int]) -> float:
        """``sum_zeta p_zeta [f_zeta(x) = f_zeta(y)]``."""
        return sum(p for z, p in enumerate(self.p) if self.leaf_label(z, x) == self.leaf_label(z, y))

    def pair_sum(self, x: Sequence[int], y: Sequence[int]) -> float:
        return sum(p * c.pair_sum(x, y) for p, c in zip(self.p, self.members))

    def norm_sums(self, x: Sequence[int]) -> tuple[float, float]:
        su = sw = 0.0
        for p, c in zip(self.p, self.members):
            a, b = c.norm_sums(x)
            su += p * a
            sw += p * b
        return su, sw

    def gram_matrix(self, inputs: Sequence[Sequence[int]] | None = None) -> np.ndarray:
        pts = [tuple(x) for x in (self.inputs if inputs is None else inputs)]
        G = np.zeros((len(pts), len(pts)))
        for z, p in enumerate(self.p):
            lab = np.array([self.labels[self.leaf_label(z, x)] for x in pts])
            G += p * (lab[:, None] == lab[None, :])
        return G


def ensemble_pair_sum(family: RandomizedTreeFamily,
                      weights: WeightSchedule | Sequence[WeightSchedule], fn: FunctionSpec,
                      x: Sequence[int], y: Sequence[int],
                      ens: EnsembleCertificate | None = None) -> float:
    ens = ens or EnsembleCertificate(family, weights, fn)
    return ens.pair_sum(x, y)


@dataclass
class StateGenerationReport(FeasibilityReport):
    K: int = 1


def _check_members(family: RandomizedTreeFamily, fn: FunctionSpec) -> None:
    for label, tree in family.members:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            report = validate(tree, fn, check_labels=False)
        if not report.ok:
            raise CertificateError(f"member {label!r} does not validate: {report.issues[0].message}")


def verify_state_generation(family: RandomizedTreeFamily,
                            weights: WeightSchedule | Sequence[WeightSchedule] | None,
                            fn: FunctionSpec, mode: str = "exhaustive", samples: int = 10_000,
                            seed: int = 0, family_mode: str = "per-vertex",
                            tolerance: float = 1e-9, check: bool = True,
                            ens: EnsembleCertificate | None = None) -> StateGenerationReport:
    """Max over checked pairs of ``|ensemble pair sum - (1 - gram)|``."""
    if check:
        _check_members(family, fn)
    if ens is None:
        if weights is None:
            weights = ensemble_default_weights(family, fn)
        ens = EnsembleCertificate(family, weights, fn, family_mode)
    D = len(ens.inputs)
    if D == 0:
        return StateGenerationReport(0, 0.0, None, mode, tolerance, ens.K)
    worst, where = 0.0, None
    if mode == "exhaustive":
        tables = [c.path_table() for c in ens.members]
        L = max(t.blocks.shape[1] for t in tables)
        cols = np.arange(D)
        for rows in _chunks(D, L):
            S = np.zeros((len(rows), D))
            gram = np.zeros((len(rows), D))
            for p, t in zip(ens.p, tables):
                S += p * t.pair_block(rows, cols)
                gram += p * (t.leaf[rows][:, None] == t.leaf[cols][None, :])
            res = np.abs(S - (1.0 - gram))
            k = int(res.argmax())
            if res.flat[k] > worst or where is None:
                worst = float(res.flat[k])
                where = (ens.inputs[rows[k // D]], ens.inputs[k % D])
        return StateGenerationReport(D * D, worst, where, "exhaustive", tolerance, ens.K)
    if mode == "sampled":
        rng = random.Random(seed)
        for _ in range(samples):
            x, y = ens.inputs[rng.randrange(D)], ens.inputs[rng.randrange(D)]
            res = abs(ens.pair_sum(x, y) - (1.0 - ens.gram(x, y)))
            if res > worst or where is None:
                worst, where = res, (x, y)
        return StateGenerationReport(samples, worst, where, f"sampled({seed},{samples})",
                                     tolerance, ens.K)
    raise ValueError(f"unknown verification mode {mode!r}")


# ---------------------------------------------------------------- success probability

@dataclass(frozen=True)
class SuccessReport:
    min_probability: float
    argmin: Input | None
    threshold: float = 0.9

    @property
    def accepted(self) -> bool:
        return self.min_probability >= self.threshold

    @property
    def measurement_bound(self) -> float:
        """Probability of reading out the correct value after generating the state."""
        return self.min_probability - 0.1


def success_probability(family: RandomizedTreeFamily, fn: FunctionSpec, x: Sequence[int]) -> float:
    """``E_zeta [f_zeta(x) = f(x)]`` under the member weights."""
    from .model import evaluate_path

    want = fn(x)
    return float(sum(p for p, (_, t) in zip(family.weights, family.members)
                     if evaluate_path(t, x).leaf_label == want))


def success_report(family: RandomizedTreeFamily, fn: FunctionSpec,
                   inputs: Sequence[Sequence[int]] | None = None,
                   threshold: float = 0.9) -> SuccessReport:
    pts = fn.domain if inputs is None else inputs
    worst, arg = math.inf, None
    for x in pts:
        p = success_probability(family, fn, x)
        if p < worst:
            worst, arg = p, tuple(x)
    return SuccessReport(worst if arg is not None else 1.0, arg, threshold)


# ---------------------------------------------------------------- objective

def ensemble_default_weights(family: RandomizedTreeFamily, fn: FunctionSpec,
                             metrics: EnsembleMetrics | None = None) -> WeightSchedule:
    metrics = metrics or ensemble_metrics(family, fn)
    return default_weights(float(metrics.T), float(metrics.G))


@dataclass(frozen=True)
class EnsembleObjective:
    value: float
    u_max: float
    w_max: float
    argmax: Input
    T: float
    G: float
    bound: float

    @property
    def slack(self) -> float:
        return self.bound - self.value

    @property
    def ok(self) -> bool:
        return self.slack >= -1e-9 * max(1.0, self.bound)


def ensemble_objective(family: RandomizedTreeFamily,
                       weights: WeightSchedule | Sequence[WeightSchedule] | None,
                       fn: FunctionSpec, family_mode: str = "per-vertex",
                       metrics: EnsembleMetrics | None = None,
                       ens: EnsembleCertificate | None = None) -> EnsembleObjective:
    """Weighted mean of member norm sums, maximized over inputs, against ``12 sqrt(G T)``.

    ``T`` and ``G`` are the largest expected depth and red count over inputs.
    """
    metrics = metrics or ensemble_metrics(family, fn)
    if ens is None:
        if weights is None:
            weights = ensemble_default_weights(family, fn, metrics)
        ens = EnsembleCertificate(family, weights, fn, family_mode)
    per = {x: ens.norm_sums(x) for x in ens.inputs}
    if not per:
        raise CertificateError("objective of an empty domain")
    arg = max(per, key=lambda x: max(per[x]))
    T, G = float(metrics.T), float(metrics.G)
    return EnsembleObjective(max(per[arg]), max(p[0] for p in per.values()),
                             max(p[1] for p in per.values()), arg, T, G,
                             12 * math.sqrt(G * T) if G > 0 else 8 * T)


def gram_min_eigenvalue(ens: EnsembleCertificate,
                        inputs: Sequence[Sequence[int]] | None = None) -> float:
    return float(np.linalg.eigvalsh(ens.gram_matrix(inputs)).min())
