from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from treecert.certificate import (
    Certificate,
    CertificateError,
    ConstantWeights,
    GenerationWeights,
    VertexWeights,
    bound_check,
    default_weights,
    dense_oracle,
    generation_weights,
    generation_bound,
    per_vertex_analysis,
    random_vertex_weights,
    schedule_from_document,
    verify_feasibility,
)
from treecert.metrics import tree_metrics
from treecert.model import BLACK, RED, FunctionSpec, ProgramTree, Query, VertexId


def _default(e):
    m = tree_metrics(e.tree, e.fn)
    return default_weights(m.T, m.G), m


@pytest.mark.parametrize("T,G,black", [(9, 1, 3.0), (5, 5, 1.0), (16, 4, 2.0)])
def test_default_weights(T, G, black):
    w = default_weights(T, G)
    assert w.black == pytest.approx(black) and w.red == pytest.approx(1 / black)


def test_default_weights_without_reds():
    with pytest.warns(UserWarning):
        assert default_weights(4, 0) == ConstantWeights(1.0, 1.0)


def test_generation_weights():
    assert generation_weights([7, 1, 1]).values == (7.0, 1.0, 1.0)
    assert generation_weights([9, 4, 0]).values == (9.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        generation_weights([3, 0, 2])
    w = GenerationWeights((4.0, 2.0))
    assert w.at(None, 1) == (2.0, 0.5)
    with pytest.raises(CertificateError):
        w.at(None, 2)


def test_equal_segments_match_sqrt_gt():
    T, G = 36, 4
    assert sum(math.sqrt(T / G) for _ in range(G)) == pytest.approx(math.sqrt(G * T))


def test_vectors_at_root(entry):
    e = entry("two_twos", n=3)
    w, _ = _default(e)
    cert = Certificate(e.tree, w, e.fn)
    u = cert.build_u((2, 0, 0), 1)
    assert len(u.components) == 1
    (color, coef), = u.components[0].terms
    assert color == RED and coef == pytest.approx(1 / math.sqrt(w.red))
    wv = cert.build_w((0, 0, 0), 1)
    assert wv.components[0].terms == ((RED, pytest.approx(math.sqrt(w.red))),)


def test_unqueried_coordinate_gives_zero(entry):
    e = entry("search", n=4)
    cert = Certificate(e.tree, _default(e)[0], e.fn)
    assert cert.build_u((1, 0, 0, 0), 2).is_zero
    assert cert.build_w((1, 0, 0, 0), 3).is_zero


def test_pair_sums_closed_form_and_literal(entry):
    e = entry("two_twos", n=3)
    cert = Certificate(e.tree, _default(e)[0], e.fn)
    for x, y in itertools.product(e.fn.domain, repeat=2):
        want = 0.0 if e.fn(x) == e.fn(y) else 1.0
        assert cert.pair_sum(x, y) == pytest.approx(want, abs=1e-12)
        assert cert.pair_sum_structured(x, y) == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("family", ["per-vertex", "paper"])
def test_feasibility_bipartiteness(entry, family):
    e = entry("matrix.bipartiteness", n=4)
    rep = verify_feasibility(e.tree, _default(e)[0], e.fn, family=family)
    assert rep.pairs == 64 * 64 and rep.residual <= 1e-9 and rep.ok


def test_constant_function():
    def program():
        yield Query.of(1, [[0], [1]], (BLACK, RED), 2)
        return "same"

    tree = ProgramTree(1, 2, program)
    fn = FunctionSpec(1, 2, [(0,), (1,)], lambda x: "same")
    rep = verify_feasibility(tree, ConstantWeights(1.0, 1.0), fn)
    assert rep.residual == 0.0


def test_corrupted_coloring_rejected():
    def program():
        b = yield Query.of(1, [[0], [1]], (BLACK, BLACK), 2)
        return b

    fn = FunctionSpec(1, 2, [(0,), (1,)], lambda x: x[0])
    with pytest.raises(CertificateError, match="G-coloring"):
        verify_feasibility(ProgramTree(1, 2, program), ConstantWeights(1.0, 1.0), fn)


def test_sampled_mode_is_seeded(entry):
    e = entry("two_twos", n=4)
    w = _default(e)[0]
    a = verify_feasibility(e.tree, w, e.fn, mode="sampled", samples=500, seed=11)
    b = verify_feasibility(e.tree, w, e.fn, mode="sampled", samples=500, seed=11)
    assert a.worst_pair == b.worst_pair and a.residual <= 1e-9


def test_objective_bounds(entry):
    e = entry("search", n=16)
    w, m = _default(e)
    rep = bound_check(e.tree, w, e.fn)
    assert rep.ok
    assert rep.get("sqrt_GT").bound == pytest.approx(12 * math.sqrt(m.G * m.T))
    assert all(c.slack >= 0 for c in rep.checks)


def test_unit_weights_bounds(entry):
    e = entry("two_twos", n=5)
    rep = bound_check(e.tree, ConstantWeights(1.0, 1.0), e.fn)
    assert rep.get("u_side").bound == 4 * (5 + 2)
    assert rep.get("w_side").bound == 4 * (2 * 5 + 2)
    assert rep.ok


def test_red_free_objective():
    def program():
        for j in (1, 2, 3):
            yield Query.of(j, [[0], [1]], (BLACK, RED), 2)
        return 0

    tree = ProgramTree(3, 2, program)
    fn = FunctionSpec(3, 2, [(0, 0, 0)], lambda x: 0)
    obj = Certificate(tree, ConstantWeights(1.0, 1.0), fn).objective()
    assert obj.u_max <= 4 * 3


def test_generation_schedule(entry):
    e = entry("two_twos", n=6)
    m = tree_metrics(e.tree, e.fn)
    w = generation_weights(m.T_g)
    assert verify_feasibility(e.tree, w, e.fn).residual <= 1e-9
    rep = bound_check(e.tree, w, e.fn)
    assert rep.ok
    cert = Certificate(e.tree, w, e.fn)
    cap = generation_bound(m.T_g, w.values)
    assert max(max(p) for p in cert.objective().per_input.values()) <= cap


def test_dense_oracle_agrees(entry):
    for name, n in (("search", 3), ("two_twos", 3), ("two_twos", 4)):
        e = entry(name, n=n)
        w, _ = _default(e)
        cert = Certificate(e.tree, w, e.fn)
        dense = dense_oracle(e.tree, w, e.fn)
        assert dense.residual <= 1e-9
        assert dense.objective == pytest.approx(cert.objective().value, abs=1e-9)
        closed = np.array([[cert.pair_sum(x, y) for y in cert.inputs] for x in cert.inputs])
        np.testing.assert_allclose(dense.pair_sums, closed, atol=1e-9)
        norms = np.array([cert.norm_sums(x) for x in cert.inputs])
        np.testing.assert_allclose(dense.norms, norms, atol=1e-9)


def test_dense_oracle_cap(entry):
    e = entry("search", n=10)
    with pytest.raises(CertificateError):
        dense_oracle(e.tree, ConstantWeights(1.0, 1.0), e.fn)


def test_per_vertex_constant_schedule(entry):
    e = entry("search", n=4)
    w, m = _default(e)
    vw = VertexWeights({}, default=(w.black, w.red))
    pv = per_vertex_analysis(e.tree, e.fn, vw)
    assert pv.bound <= 2 * math.sqrt(m.G * m.T) + 1e-12
    assert verify_feasibility(e.tree, vw, e.fn).residual <= 1e-9


def test_balancing_is_idempotent_and_helps(entry):
    e = entry("search", n=4)
    for seed in range(5):
        vw = random_vertex_weights(e.tree, e.fn, seed=seed)
        once = vw.balanced()
        twice = once.balanced()
        for v in once.table:
            assert twice.table[v] == pytest.approx(once.table[v])
        pv = per_vertex_analysis(e.tree, e.fn, vw)
        assert pv.improved
        assert verify_feasibility(e.tree, vw, e.fn).residual <= 1e-9


def test_schedule_documents():
    assert schedule_from_document({"constant": [2, 0.5]}) == ConstantWeights(2.0, 0.5)
    assert schedule_from_document({"generation": [3, 1]}).values == (3.0, 1.0)
    vw = schedule_from_document({"per_vertex": [{"prefix": [], "black": 2, "red": 3}],
                                 "default": [1, 1]})
    assert vw.at(VertexId(), 0) == (2.0, 3.0)
    assert vw.at(VertexId().child(1, [0]), 0) == (1.0, 1.0)
    with pytest.raises(ValueError):
        schedule_from_document({})
