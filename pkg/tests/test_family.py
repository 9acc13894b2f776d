from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from treecert.family import CrossFamily, cross_family


def test_n2_closed_form():
    fam = CrossFamily(2)
    assert fam.theta == pytest.approx(0.0, abs=1e-15)
    assert fam.scale == pytest.approx(1.0)
    np.testing.assert_allclose(fam.mu(0), [0, 1], atol=1e-15)
    np.testing.assert_allclose(fam.nu(0), [1, 0], atol=1e-15)
    assert fam.norm_sq() == pytest.approx(1.0)


def test_n1_is_zero():
    fam = CrossFamily(1)
    assert not fam.mu(0).any() and not fam.nu(0).any()
    assert fam.norm_sq() == 0


def test_n4_norm():
    fam = CrossFamily(4)
    for i in range(4):
        assert fam.mu(i) @ fam.mu(i) == pytest.approx(1.5, abs=1e-12)
        assert fam.nu(i) @ fam.nu(i) == pytest.approx(1.5, abs=1e-12)


def test_rejects_empty():
    with pytest.raises(ValueError):
        CrossFamily(0)


@given(st.integers(min_value=2, max_value=64))
def test_identities(N):
    fam = cross_family(N)
    M, V = fam.mu_matrix(), fam.nu_matrix()
    np.testing.assert_allclose(M @ V.T, 1 - np.eye(N), atol=1e-12)
    np.testing.assert_allclose((M ** 2).sum(1), 2 * (N - 1) / N, atol=1e-12)
    np.testing.assert_allclose((V ** 2).sum(1), 2 * (N - 1) / N, atol=1e-12)
    assert fam.norm_sq() < 2
    assert fam.theta ** 2 == pytest.approx(0.5 - math.sqrt(N - 1) / N, abs=1e-12)


@given(st.integers(min_value=1, max_value=30), st.data())
def test_cross_inner_closed_form(N, data):
    fam = cross_family(N)
    i = data.draw(st.integers(0, N - 1))
    j = data.draw(st.integers(0, N - 1))
    assert fam.cross_inner(i, j) == pytest.approx(float(fam.mu(i) @ fam.nu(j)), abs=1e-12)
