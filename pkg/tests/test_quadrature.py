import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strata.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, gauss_kronrod


@pytest.mark.parametrize("deg", range(0, 23))
def test_kronrod_exact_to_degree_22(deg):
    exact = (1 - (-1) ** (deg + 1)) / (deg + 1)
    assert KRONROD_WEIGHTS @ NODES**deg == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("deg", range(0, 14))
def test_gauss_exact_to_degree_13(deg):
    exact = (1 - (-1) ** (deg + 1)) / (deg + 1)
    assert GAUSS_WEIGHTS @ NODES**deg == pytest.approx(exact, abs=1e-14)


def test_inverse_sqrt_endpoint():
    r = gauss_kronrod(lambda x: 1 / np.sqrt(x), 0.0, 1.0, rtol=1e-10)
    assert r.converged
    assert r.value == pytest.approx(2.0, rel=1e-9)


@given(x0=st.floats(0.1, 0.9), w=st.floats(1e-4, 1e-1))
def test_lorentzian(x0, w):
    r = gauss_kronrod(lambda x: w / ((x - x0) ** 2 + w**2), 0.0, 1.0, rtol=1e-9)
    exact = math.atan((1 - x0) / w) + math.atan(x0 / w)
    assert r.value == pytest.approx(exact, rel=1e-8)


def test_vector_valued():
    r = gauss_kronrod(lambda x: np.array([np.sin(x), np.cos(x)]), 0.0, math.pi, rtol=1e-12)
    np.testing.assert_allclose(r.value, [2.0, 0.0], atol=1e-12)


def test_breakpoints_help_kinks():
    f = lambda x: np.abs(x - 1 / 3)
    r = gauss_kronrod(f, 0.0, 1.0, rtol=1e-13, points=[1 / 3])
    assert r.value == pytest.approx(5 / 18, rel=1e-13)
    assert r.n_intervals == 8


def test_budget_exhaustion_reported():
    r = gauss_kronrod(lambda x: np.sin(1 / x), 1e-6, 1.0, rtol=1e-14, max_intervals=20)
    assert not r.converged


def test_deterministic():
    f = lambda x: np.exp(-x) * np.sin(40 * x)
    a = gauss_kronrod(f, 0, 10, rtol=1e-10)
    b = gauss_kronrod(f, 0, 10, rtol=1e-10)
    assert a.value == b.value and a.n_evals == b.n_evals


def test_bad_limits():
    with pytest.raises(ValueError):
        gauss_kronrod(np.sin, 1.0, 0.0)
