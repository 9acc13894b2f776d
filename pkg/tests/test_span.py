from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from treecert.certificate import ConstantWeights, GenerationWeights, default_weights, generation_weights
from treecert.metrics import tree_metrics
from treecert.model import BLACK, RED, FunctionSpec, ProgramTree, Query, evaluate_path
from treecert.span import (
    Poly,
    SpanProgramError,
    build_span_program,
    check_witnesses,
    float_axiom_residual,
    negative_witness,
    positive_witness,
    witness_sizes,
)


def _default(e):
    m = tree_metrics(e.tree, e.fn)
    return default_weights(m.T, m.G), m


def test_poly_arithmetic():
    a = Poly.power("b", 1)
    assert a * Poly.power("b", -1) == 1
    assert (a + a) * a == Poly.power("b", 2, 2)
    assert (a - a).is_zero()
    assert Poly.power("b", 2).evaluate(lambda k: 9.0) == pytest.approx(9.0)
    assert Poly.power("b", 1).evaluate(lambda k: 9.0) == pytest.approx(3.0)


def test_single_query_tree():
    def program():
        return (yield Query.of(1, [[0], [1]], (BLACK, RED), 2))

    tree = ProgramTree(1, 2, program)
    w = ConstantWeights(4.0, 0.25)
    prog = build_span_program(tree, w)
    assert prog.dimension == 3 and len(prog.columns) == 2 and len(prog.leaves) == 2
    ws = witness_sizes(prog, [(0,), (1,)])
    assert ws.all_ok
    # black path: positive 1/W_black, negative picks up the red sibling
    chk = check_witnesses(prog, (0,))
    assert chk.positive_size == pytest.approx(1 / 4.0)
    assert chk.negative_size == pytest.approx(0.25)
    assert ws.wsize == pytest.approx(math.sqrt(ws.positive * ws.negative))


@pytest.mark.parametrize("name,n", [("search", 4), ("two_twos", 3), ("counting", 3)])
def test_axioms_exhaustive(entry, name, n):
    e = entry(name, n=n)
    w, _ = _default(e)
    prog = build_span_program(e.tree, w, e.fn)
    ws = witness_sizes(prog, e.fn.domain, e.fn)
    assert ws.all_ok, ws.failures[:3]
    assert float_axiom_residual(prog, e.fn.domain[-1]) <= 1e-10


def test_column_shape(entry):
    e = entry("two_twos", n=3)
    prog = build_span_program(e.tree, _default(e)[0], e.fn)
    A = prog.matrix()
    for k in range(A.shape[1]):
        nz = np.flatnonzero(A[:, k])
        assert len(nz) == 2 and A[nz, k].sum() == pytest.approx(0.0)
        assert A[prog.columns[k].parent, k] > 0
    internal = sum(1 for node in prog.nodes if not node.is_leaf)
    assert len(prog.columns) == 3 * internal


def test_search_telescoping(entry):
    e = entry("search", n=4)
    w, _ = _default(e)
    prog = build_span_program(e.tree, w, e.fn)
    x = (0, 0, 1, 0)
    pos = positive_witness(prog, x)
    total = {}
    for k, c in pos.items():
        col = prog.columns[k]
        v = float(c.evaluate(prog.value)) * math.sqrt(col.weight)
        total[col.parent] = total.get(col.parent, 0) + v
        total[col.child] = total.get(col.child, 0) - v
    leaf = prog.leaf_of(x)
    assert {i: round(v, 12) for i, v in total.items() if abs(v) > 1e-12} == {prog.root: 1.0, leaf: -1.0}


def test_all_black_positive_size(entry):
    e = entry("search", n=5)
    w = ConstantWeights(2.5, 0.4)
    prog = build_span_program(e.tree, w, e.fn)
    assert check_witnesses(prog, (0,) * 5).positive_size == pytest.approx(5 / 2.5)


def test_negative_witness_is_path_indicator(entry):
    e = entry("two_twos", n=3)
    prog = build_span_program(e.tree, _default(e)[0], e.fn)
    x = (2, 0, 2)
    neg = negative_witness(prog, x)
    assert set(neg) == set(prog.path(x)) and set(neg.values()) == {1}
    assert sum(v * neg.get(i, 0) for i, v in prog.target(prog.leaf_of(x)).items()) == 0


def test_negative_locality(entry):
    e = entry("two_twos", n=4)
    prog = build_span_program(e.tree, _default(e)[0], e.fn)
    for x in e.fn.domain:
        path = set(prog.path(x))
        chk = check_witnesses(prog, x)
        expected = {k for k, c in enumerate(prog.columns) if c.parent in path and c.child not in path}
        assert chk.contributing == expected


def test_unit_weight_sizes(entry):
    for name, n in (("search", 5), ("two_twos", 4)):
        e = entry(name, n=n)
        m = tree_metrics(e.tree, e.fn)
        ws = witness_sizes(build_span_program(e.tree, ConstantWeights(1.0, 1.0), e.fn), e.fn.domain)
        assert ws.positive <= m.T
        assert ws.all_ok


def test_default_weight_sizes_search(entry):
    for n in range(1, 7):
        e = entry("search", n=n)
        w, m = _default(e)
        ws = witness_sizes(build_span_program(e.tree, w, e.fn), e.fn.domain, e.fn)
        bound = 2 * math.sqrt(m.G * m.T)
        assert ws.positive <= bound + 1e-12 and ws.negative <= bound + 1e-12


def test_block_expansion_cost(entry):
    """An off-path black block pays once per symbol it holds."""
    e = entry("two_twos", n=3)
    w, _ = _default(e)
    prog = build_span_program(e.tree, w, e.fn)
    chk = check_witnesses(prog, (2, 2, 0))
    # reds at the first two vertices, each leaving behind the two-symbol black block
    assert chk.negative_size == pytest.approx(2 * 2 * w.black)


def test_generation_weights_exact(entry):
    e = entry("two_twos", n=4)
    m = tree_metrics(e.tree, e.fn)
    prog = build_span_program(e.tree, generation_weights(m.T_g), e.fn)
    assert witness_sizes(prog, e.fn.domain, e.fn).all_ok


def test_cap(entry):
    e = entry("search", n=6)
    with pytest.raises(SpanProgramError):
        build_span_program(e.tree, ConstantWeights(1.0, 1.0), cap=5)
