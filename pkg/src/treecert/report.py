"""Runs behind each CLI command and their tabular output.

Every run returns a :class:`Report`: a list of rows sharing one header, a
summary mapping and a pass flag.  Numeric claims carry the id of the bound
they are compared with, so a failing row says which inequality broke.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .catalog import get_entry
from .catalog.entry import CatalogEntry
from .certificate import (
    Certificate,
    CertificateError,
    ConstantWeights,
    WeightSchedule,
    bound_check,
    default_weights,
    generation_weights,
    schedule_from_document,
    verify_feasibility,
)
from .ensemble import (
    EnsembleCertificate,
    ensemble_default_weights,
    ensemble_objective,
    success_report,
    verify_state_generation,
)
from .metrics import ensemble_metrics, harmonic, tree_metrics
from .model import FunctionSpec, RandomizedTreeFamily, TreeProgram, validate
from .span import build_span_program, witness_sizes

DEFAULT_TOLERANCES = {"residual": 1e-9, "family": 1e-12, "oracle": 1e-9}
STRUCTURAL = {"partition", "query_once", "budget", "malformed", "g_coloring"}


class InputError(ValueError):
    """Malformed command input; the CLI exits with status 2."""


@dataclass
class Instance:
    name: str
    params: dict
    model: TreeProgram | RandomizedTreeFamily
    fn: FunctionSpec
    entry: CatalogEntry | None = None

    @property
    def randomized(self) -> bool:
        return isinstance(self.model, RandomizedTreeFamily)

    @property
    def label(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()) if v is not None)
        return f"{self.name}({inner})" if inner else self.name

    @classmethod
    def from_entry(cls, entry: CatalogEntry) -> "Instance":
        return cls(entry.name, dict(entry.params), entry.model, entry.fn, entry)


@dataclass
class Report:
    command: str
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    passed: bool = True

    def header(self) -> list[str]:
        cols: dict[str, None] = {}
        for r in self.rows:
            for k in r:
                cols.setdefault(k)
        return list(cols)

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.header(), lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()

    def summary_text(self) -> str:
        doc = {"command": self.command, "pass": self.passed, **self.summary}
        return json.dumps(_jsonable(doc), sort_keys=True)

    def write(self, out: str | Path) -> tuple[Path, Path]:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(self.csv_text(), encoding="utf-8")
        side = out.with_suffix(".json")
        side.write_text(self.summary_text() + "\n", encoding="utf-8")
        return out, side


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (tuple, list)):
        return " ".join(_fmt(a) for a in v)
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(a) for k, a in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(a) for a in v]
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


# ---------------------------------------------------------------- configuration

def parse_mode(mode: str) -> tuple[str, int]:
    if mode == "exhaustive":
        return "exhaustive", 0
    if mode.startswith("sampled:"):
        try:
            count = int(mode.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad sample count in mode {mode!r}") from None
        if count <= 0:
            raise InputError("sample count must be positive")
        return "sampled", count
    raise InputError(f"mode must be 'exhaustive' or 'sampled:N', got {mode!r}")


def resolve_weights(spec: str, T: float, G: float, T_g) -> WeightSchedule:
    """``default``, ``generation``, ``const:B,R`` or ``file:PATH``."""
    if spec == "default":
        return default_weights(T, G)
    if spec == "generation":
        return generation_weights(T_g)
    if spec.startswith("const:"):
        try:
            b, r = (float(a) for a in spec[6:].split(","))
        except ValueError:
            raise InputError(f"const weights need two numbers, got {spec!r}") from None
        return ConstantWeights(b, r)
    if spec.startswith("file:"):
        path = Path(spec[5:])
        try:
            return schedule_from_document(json.loads(path.read_text()))
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"cannot load weights from {path}: {exc}") from None
    raise InputError(f"unknown weight schedule {spec!r}")


def catalog_instance(problem: str, params: dict) -> Instance:
    from .catalog.entry import ParamError

    try:
        return Instance.from_entry(get_entry(problem, **params))
    except (ParamError, ValueError) as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------- commands

def run_validate(inst: Instance) -> Report:
    rep = Report("validate")
    trees = inst.model.trees() if inst.randomized else [inst.model]
    structural = other = 0
    for z, tree in enumerate(trees):
        v = validate(tree, inst.fn, check_labels=not inst.randomized)
        for issue in v.issues:
            rep.rows.append({"instance": inst.label, "member": z, "kind": issue.kind,
                             "input": issue.input, "message": issue.message})
            if issue.kind in STRUCTURAL:
                structural += 1
            else:
                other += 1
    rep.summary = {"instance": inst.label, "members": len(trees), "inputs": len(inst.fn.domain),
                   "structural_issues": structural, "label_issues": other}
    rep.passed = structural == 0 and other == 0
    if not rep.rows:
        rep.rows.append({"instance": inst.label, "member": "", "kind": "ok", "input": "",
                         "message": ""})
    if structural:
        first = next(r for r in rep.rows if r["kind"] in STRUCTURAL)
        raise InputError(first["message"])
    return rep


def run_analyze(inst: Instance) -> Report:
    rep = Report("analyze")
    if inst.randomized:
        m = ensemble_metrics(inst.model, inst.fn)
        row = {"instance": inst.label, "K": inst.model.K, "inputs": len(inst.fn.domain),
               "T": m.T, "G": m.G, "G_max": m.G_max, "T_g": m.T_g, "mode": m.mode}
        expected = inst.entry.exact.get("G") if inst.entry else None
        if expected is not None:
            row["G_expected"] = expected
            row["G_matches"] = m.G == expected
            rep.passed = bool(row["G_matches"])
    else:
        m = tree_metrics(inst.model, inst.fn)
        row = {"instance": inst.label, "K": 1, "inputs": len(inst.fn.domain),
               "T": m.T, "G": m.G, "G_max": m.G, "T_g": m.T_g, "mode": "exact"}
        if inst.entry:
            for key, bound in inst.entry.bounds.items():
                if key in ("T", "G"):
                    row[f"{key}_bound"] = bound
                    rep.passed &= getattr(m, key) <= bound
    rep.rows.append(row)
    rep.summary = dict(row)
    return rep


def run_certify(inst: Instance, weights: str = "default", mode: str = "exhaustive",
                family: str = "per-vertex", seed: int = 0,
                tolerances: dict | None = None) -> Report:
    if inst.randomized:
        return run_ensemble(inst, weights, mode, family, seed, tolerances)
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    kind, samples = parse_mode(mode)
    v = validate(inst.model, inst.fn)
    if not v.ok:
        raise InputError("tree does not validate: " + v.issues[0].message)
    m = tree_metrics(inst.model, inst.fn)
    W = resolve_weights(weights, m.T, m.G, m.T_g)
    try:
        cert = Certificate(inst.model, W, inst.fn, family=family)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    feas = verify_feasibility(inst.model, W, inst.fn, mode=kind, samples=samples or 10_000,
                              seed=seed, family=family, tolerance=tol["residual"], check=False,
                              cert=cert)
    obj = cert.objective()
    bounds = bound_check(inst.model, W, inst.fn, family=family, cert=cert)
    rep = Report("certify")
    base = {"instance": inst.label, "T": m.T, "G": m.G, "weights": W.describe(),
            "family": family, "mode": feas.mode, "pairs": feas.pairs}
    rep.rows.append({**base, "quantity": "residual", "bound_id": "residual_tolerance",
                     "value": feas.residual, "bound": tol["residual"],
                     "slack": tol["residual"] - feas.residual,
                     "pass": feas.residual <= tol["residual"]})
    for c in bounds.checks:
        rep.rows.append({**base, "quantity": "objective" if c.name in ("sqrt_GT", "generation_formula",
                                                                        "sum_sqrt_Tg") else c.name,
                         "bound_id": c.name, "value": c.value, "bound": c.bound,
                         "slack": c.slack, "pass": c.ok if c.asserted else ""})
    headline = next((c for c in bounds.checks if c.name == "sqrt_GT"), None)
    rep.passed = feas.residual <= tol["residual"] and bounds.ok
    rep.summary = {"instance": inst.label, "T": m.T, "G": m.G, "objective": obj.value,
                   "headline_bound": headline.bound if headline else None,
                   "bound_id": "12*sqrt(G*T)" if headline else "construction caps",
                   "slack": headline.slack if headline else None,
                   "residual": feas.residual, "weights": W.describe(), "family": family,
                   "mode": feas.mode, "seed": seed,
                   "failures": [c.name for c in bounds.failures()]}
    return rep


def run_ensemble(inst: Instance, weights: str = "default", mode: str = "exhaustive",
                 family: str = "per-vertex", seed: int = 0,
                 tolerances: dict | None = None) -> Report:
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    kind, samples = parse_mode(mode)
    fam = inst.model if inst.randomized else RandomizedTreeFamily([(0, inst.model)], name=inst.name)
    met = ensemble_metrics(fam, inst.fn)
    if weights == "default":
        W = ensemble_default_weights(fam, inst.fn, met)
    else:
        W = resolve_weights(weights, float(met.T), float(met.G), met.T_g)
    try:
        ens = EnsembleCertificate(fam, W, inst.fn, family)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    feas = verify_state_generation(fam, W, inst.fn, mode=kind, samples=samples or 10_000,
                                   seed=seed, tolerance=tol["residual"], ens=ens)
    succ = success_report(fam, inst.fn)
    obj = ensemble_objective(fam, W, inst.fn, metrics=met, ens=ens)
    row = {"instance": inst.label, "K": fam.K, "T": met.T, "G": met.G, "G_max": met.G_max,
           "weights": W.describe(), "mode": feas.mode, "pairs": feas.pairs,
           "gram_residual": feas.residual, "min_success": succ.min_probability,
           "measurement_bound": succ.measurement_bound, "objective": obj.value,
           "bound_id": "12*sqrt(G*T)", "bound": obj.bound, "slack": obj.slack}
    expected = inst.entry.exact.get("G") if inst.entry else None
    if expected is not None:
        row["G_expected"] = expected
    ok = feas.residual <= tol["residual"] and succ.accepted and obj.ok
    row["pass"] = ok
    rep = Report("ensemble", [row], passed=ok)
    rep.summary = {"instance": inst.label, "K": fam.K, "T": met.T, "G": met.G,
                   "objective": obj.value, "headline_bound": obj.bound, "slack": obj.slack,
                   "residual": feas.residual, "min_success": succ.min_probability,
                   "seed": seed}
    return rep


def run_span(inst: Instance, weights: str = "default") -> Report:
    if inst.randomized:
        raise InputError("span programs are built for single trees")
    v = validate(inst.model, inst.fn)
    if not v.ok:
        raise InputError("tree does not validate: " + v.issues[0].message)
    m = tree_metrics(inst.model, inst.fn)
    W = resolve_weights(weights, m.T, m.G, m.T_g)
    prog = build_span_program(inst.model, W, inst.fn)
    ws = witness_sizes(prog, inst.fn.domain, inst.fn)
    bound = 2 * math.sqrt(m.G * m.T)
    row = {"instance": inst.label, "d": prog.dimension, "inputs_I": len(prog.columns),
           "T": m.T, "G": m.G, "weights": W.describe(), "wsize_pos": ws.positive,
           "wsize_neg": ws.negative, "wsize": ws.wsize, "bound_id": "2*sqrt(G*T)",
           "bound": bound, "slack_pos": bound - ws.positive, "slack_neg": bound - ws.negative,
           "axioms": ws.all_ok}
    ok = ws.all_ok and ws.positive <= bound * (1 + 1e-12) and ws.negative <= bound * (1 + 1e-12)
    row["pass"] = ok
    rep = Report("span", [row], passed=ok)
    rep.summary = {k: row[k] for k in ("instance", "d", "inputs_I", "T", "G", "wsize_pos",
                                       "wsize_neg", "wsize", "bound", "axioms")}
    return rep


TRENDS = {
    "matrix.bipartiteness": ("12*n^1.5", lambda p: 12 * p["n"] ** 1.5),
    "list.bipartiteness": ("12*n^1.5", lambda p: 12 * p["n"] ** 1.5),
}


def run_sweep(problem: str, param: str, values: list, params: dict | None = None,
              seed: int = 0, family: str = "per-vertex", objective_cap: int = 200_000) -> Report:
    """One row per parameter value: domain size, T, G, objective and bounds.

    For randomized families the objective is skipped (left blank) once
    ``K * inputs`` exceeds ``objective_cap``; the expected metrics are always exact.
    """
    if not values:
        raise InputError("sweep range is empty")
    rep = Report("sweep")
    for val in values:
        p = {**(params or {}), param: val}
        inst = catalog_instance(problem, p)
        row: dict = {"problem": problem, param: val, "inputs": len(inst.fn.domain), "seed": seed}
        if inst.randomized:
            met = ensemble_metrics(inst.model, inst.fn)
            row.update({"K": inst.model.K, "T": met.T, "G": met.G})
            ok = True
            if inst.model.K * len(inst.fn.domain) <= objective_cap:
                obj = ensemble_objective(inst.model, None, inst.fn, family, metrics=met)
                row.update({"objective": obj.value, "bound_id": "12*sqrt(G*T)",
                            "bound": obj.bound, "ratio": obj.value / obj.bound})
                ok = obj.ok
            if problem == "min" and isinstance(met.G, Fraction):
                row["H_n"] = harmonic(int(val))
                row["G_equals_H_n"] = met.G == row["H_n"]
                ok &= row["G_equals_H_n"]
        else:
            v = validate(inst.model, inst.fn)
            if not v.ok:
                raise InputError(f"{inst.label} does not validate: {v.issues[0].message}")
            m = tree_metrics(inst.model, inst.fn)
            W = default_weights(m.T, m.G)
            obj = Certificate(inst.model, W, inst.fn, family=family).objective()
            bound = 12 * math.sqrt(m.G * m.T) if m.G else 8 * m.T
            row.update({"K": 1, "T": m.T, "G": m.G, "objective": obj.value,
                        "bound_id": "12*sqrt(G*T)", "bound": bound, "ratio": obj.value / bound})
            ok = obj.value <= bound * (1 + 1e-12)
            trend = TRENDS.get(problem)
            if trend:
                row["trend_id"], row["trend_bound"] = trend[0], trend[1](p)
                ok &= obj.value <= row["trend_bound"]
        row["pass"] = ok
        rep.passed &= ok
        rep.rows.append(row)
    rep.summary = {"problem": problem, "param": param, "values": values, "seed": seed,
                   "rows": len(rep.rows)}
    return rep
