"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import numpy as np

from conftest import ACCEPTANCE_LINES
from treecert.catalog import get_entry
from treecert.catalog import reference as ref
from treecert.catalog.graphs import CycleDraw, GraphInstance, decode_list, decode_matrix, encode_matrix
from treecert.catalog.matrix import k_cycle_single_draw
from treecert.certificate import (
    Certificate,
    bound_check,
    default_weights,
    dense_oracle,
    generation_weights,
    generation_bound,
    verify_feasibility,
)
from treecert.ensemble import success_report, verify_state_generation
from treecert.family import cross_family
from treecert.metrics import ensemble_metrics, harmonic, tree_metrics
from treecert.model import evaluate_path, validate
from treecert.report import run_sweep
from treecert.span import build_span_program, witness_sizes


def record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


FEASIBILITY_CASES = [
    ("search", {"n": 6}),
    ("two_twos", {"n": 5}),
    ("counting", {"n": 5, "ell": 3, "r": 2}),
    ("threshold", {"n": 5, "k": 2}),
    ("matrix.bipartiteness", {"n": 4}),
    ("matrix.forest_detection", {"n": 4}),
    ("matrix.st_shortest_path", {"n": 4}),
    ("matrix.topological_sort", {"n": 4}),
    ("list.bfs_tree", {"n": 3}),
    ("list.bipartiteness", {"n": 3}),
]


def _certified(name, params):
    e = get_entry(name, **params)
    m = tree_metrics(e.tree, e.fn)
    w = default_weights(m.T, m.G)
    return e, m, w, Certificate(e.tree, w, e.fn)


def test_criterion_1_biorthogonal_family():
    start = time.perf_counter()
    worst = 0.0
    for N in range(1, 65):
        fam = cross_family(N)
        M, V = fam.mu_matrix(), fam.nu_matrix()
        want = 2 * (N - 1) / N
        worst = max(worst, np.abs((M * M).sum(axis=1) - want).max(),
                    np.abs((V * V).sum(axis=1) - want).max())
        if N >= 2:
            worst = max(worst, np.abs(M @ V.T - (1 - np.eye(N))).max())
    elapsed = time.perf_counter() - start
    record(1, worst <= 1e-12 and elapsed < 1.0,
           f"max deviation {worst:.2e} over N=1..64 in {elapsed:.3f}s")


def test_criterion_2_exact_feasibility():
    worst, slowest, bad = 0.0, 0.0, []
    for name, params in FEASIBILITY_CASES:
        start = time.perf_counter()
        e, _, w, cert = _certified(name, params)
        rep = verify_feasibility(e.tree, w, e.fn, cert=cert)
        elapsed = time.perf_counter() - start
        worst, slowest = max(worst, rep.residual), max(slowest, elapsed)
        if rep.residual > 1e-9 or elapsed >= 60:
            bad.append(f"{name}{params}: {rep.residual:.2e} in {elapsed:.1f}s")
    record(2, not bad, f"max residual {worst:.2e}, slowest run {slowest:.1f}s"
           + (f"; failing {bad}" if bad else ""))


def test_criterion_3_objective_bounds():
    bad, tightest = [], math.inf
    for name, params in FEASIBILITY_CASES:
        e, m, w, cert = _certified(name, params)
        obj = cert.objective()
        rep = bound_check(e.tree, w, e.fn, cert=cert)
        bound = 12 * math.sqrt(m.G * m.T)
        checks = {c.name: c for c in rep.checks}
        ok = obj.value <= bound and checks["u_side"].ok and checks["w_side"].ok
        tightest = min(tightest, bound - obj.value, checks["u_side"].slack, checks["w_side"].slack)
        if not ok:
            bad.append(f"{name}{params}")
    record(3, not bad, f"smallest slack {tightest:.3f} across {len(FEASIBILITY_CASES)} instances"
           + (f"; failing {bad}" if bad else ""))


def test_criterion_4_dense_oracle():
    path3 = GraphInstance.of(3, [(0, 1), (1, 2)])
    cases = [("search", {"n": 3}), ("two_twos", {"n": 4}),
             ("list.bfs_tree", {"n": 3, "domain": [path3]})]
    worst = 0.0
    for name, params in cases:
        e, _, w, cert = _certified(name, params)
        dense = dense_oracle(e.tree, w, e.fn)
        closed = np.array([[cert.pair_sum(x, y) for y in cert.inputs] for x in cert.inputs])
        worst = max(worst, np.abs(dense.pair_sums - closed).max(),
                    abs(dense.objective - cert.objective().value))
    record(4, worst <= 1e-9, f"max closed-form vs dense gap {worst:.2e}")


def test_criterion_5_min_ensemble():
    start = time.perf_counter()
    e = get_entry("min", n=4)
    rep = verify_state_generation(e.family, None, e.fn)
    met = ensemble_metrics(e.family, e.fn)
    success = success_report(e.family, e.fn)
    elapsed = time.perf_counter() - start
    ok = (rep.K == 24 and len(e.fn.domain) == 4 ** 4 and rep.residual <= 1e-9
          and met.G == Fraction(25, 12) and success.min_probability == 1.0 and elapsed < 300)
    record(5, ok, f"K={rep.K} residual {rep.residual:.2e} over {rep.pairs} pairs, "
           f"E[G]={met.G}, min success {success.min_probability} in {elapsed:.1f}s")


def test_criterion_6_generation_schedule():
    e = get_entry("two_twos", n=9)
    m = tree_metrics(e.tree, e.fn)
    w = generation_weights(m.T_g)
    cert = Certificate(e.tree, w, e.fn)
    obj = cert.objective()
    cap = generation_bound(m.T_g, w.values)
    per_input = max(max(v) for v in obj.per_input.values())
    sqrt_bound = 4 + 8 * sum(math.sqrt(t) for t in m.T_g[1:])
    residual = verify_feasibility(e.tree, w, e.fn, cert=cert).residual
    ok = per_input <= cap and obj.value <= sqrt_bound and residual <= 1e-9
    record(6, ok, f"T_g={tuple(m.T_g)} objective {obj.value:.3f} <= per-input cap {cap:.3f} "
           f"and <= 4+8*sum sqrt(T_g) = {sqrt_bound:.3f}; residual {residual:.1e}")


def test_criterion_7_span_program():
    cases = [("search", n) for n in range(1, 7)] + [("two_twos", n) for n in range(2, 6)]
    axioms_ok, over = True, []
    for name, n in cases:
        e = get_entry(name, n=n)
        m = tree_metrics(e.tree, e.fn)
        prog = build_span_program(e.tree, default_weights(m.T, m.G), e.fn)
        ws = witness_sizes(prog, e.fn.domain, e.fn)
        axioms_ok &= ws.all_ok
        bound = 2 * math.sqrt(m.G * m.T)
        if max(ws.positive, ws.negative) > bound + 1e-12:
            over.append(f"{name}(n={n}) wsize+={ws.positive:.3f} wsize-={ws.negative:.3f} "
                        f"> {bound:.3f}")
    record(7, axioms_ok and not over,
           f"witness axioms {'hold' if axioms_ok else 'FAIL'} on all {len(cases)} trees"
           + (f"; size bound exceeded: {over}" if over else "; sizes within 2*sqrt(GT)"))


def test_criterion_8_classical_oracles():
    bad, checked = [], 0
    for a in range(1, 4):
        for b in range(1, 4):
            e = get_entry("list.hopcroft_karp_matching", a=a, b=b)
            for x in e.fn.domain:
                g = decode_list(x, a + b)
                lab = evaluate_path(e.tree, x).leaf_label
                checked += 1
                if not (ref.is_matching(g, lab) and len(lab) == ref.brute_max_matching(g)):
                    bad.append(("matching", a, b, x))
    refs = {
        "matrix.strongly_connected_components": lambda g, lab: lab == ref.brute_scc(g),
        "matrix.components": lambda g, lab: lab == ref.brute_components(g),
        "matrix.topological_sort": lambda g, lab: ref.is_topological_order(g, lab),
        "matrix.bipartiteness": lambda g, lab: lab == ref.brute_bipartite(g),
    }
    for name, agree in refs.items():
        e = get_entry(name, n=4)
        directed = name in ("matrix.strongly_connected_components", "matrix.topological_sort")
        for x in e.fn.domain:
            g = decode_matrix(x, 4, directed)
            lab = evaluate_path(e.tree, x).leaf_label
            checked += 1
            if not agree(g, lab):
                bad.append((name, x))
    record(8, not bad, f"{checked} leaf outputs match brute force"
           + (f"; {len(bad)} mismatches, first {bad[0]}" if bad else ""))


def test_criterion_9_scaling():
    bip = run_sweep("matrix.bipartiteness", "n", list(range(4, 9)), {"domain": 200, "seed": 7}, seed=7)
    bip_ok = all(r["objective"] <= 12 * r["n"] ** 1.5 for r in bip.rows)
    mins = run_sweep("min", "n", list(range(3, 8)), {"inputs": 12, "seed": 7}, seed=7)
    min_ok = all(r["G"] == harmonic(r["n"]) for r in mins.rows)
    worst = max(r["objective"] / (12 * r["n"] ** 1.5) for r in bip.rows)
    record(9, bip_ok and min_ok,
           f"bipartiteness max objective/12n^1.5 = {worst:.3f} over "
           f"{sum(r['inputs'] for r in bip.rows)} graphs; E[G]=H_n for n=3..7: {min_ok}")


def test_criterion_10_k_cycle():
    rng = random.Random(2024)
    v, k, draws = 0, 3, 10_000
    while True:
        g = GraphInstance.of(6, [(a, b) for a in range(6) for b in range(a + 1, 6) if rng.random() < 0.4])
        if ref.brute_k_cycle_through(g, v, k):
            break
    tree_input = encode_matrix(g)
    hits = 0
    for _ in range(draws):
        draw = CycleDraw.draw(6, k, rng)
        tree = k_cycle_single_draw(g, draw, v)
        hits += evaluate_path(tree, tree_input).leaf_label is True
    p_hat = hits / draws
    p = 1 / (2 * k) ** (k - 1)
    sigma = math.sqrt(p * (1 - p) / draws)
    record(10, p_hat >= p - 3 * sigma,
           f"per-draw success {p_hat:.4f} >= 1/36 - 3 sigma = {p - 3 * sigma:.4f} "
           f"on {g.m} edges, {draws} draws")
