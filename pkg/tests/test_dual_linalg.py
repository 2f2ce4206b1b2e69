import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spintop import dual
from spintop.dual import Dual
from spintop.linalg import jacobi_svd, rank_from_singular_values


def test_derivative_of_composite():
    f = lambda x: dual.sin(x) * dual.sqrt(1 + x * x) / (2 + dual.cos(x))  # noqa: E731
    x0 = 0.7
    g = lambda x: math.sin(x) * math.sqrt(1 + x * x) / (2 + math.cos(x))  # noqa: E731
    h = 1e-6
    assert dual.derivative(f, x0) == pytest.approx((g(x0 + h) - g(x0 - h)) / (2 * h), rel=1e-8)


def test_power_and_division_rules():
    assert dual.derivative(lambda x: x**3, 2.0) == pytest.approx(12.0)
    assert dual.derivative(lambda x: 1.0 / x, 4.0) == pytest.approx(-1 / 16)


def test_gradient_vector_mode():
    val, g = dual.gradient(lambda z: z[0] * z[1] + z[2] ** 2, [1.0, 2.0, 3.0])
    assert val == 11.0
    np.testing.assert_array_equal(g, [2.0, 1.0, 6.0])


def test_second_partials_nested():
    f = lambda x, y: x**2 * y + dual.sin(x * y)  # noqa: E731
    x, y = 0.4, 1.3
    v, fx, fy, fxx, fxy, fyy = dual.second_partials(f, x, y)
    assert v == pytest.approx(x * x * y + math.sin(x * y))
    assert fx == pytest.approx(2 * x * y + y * math.cos(x * y))
    assert fy == pytest.approx(x * x + x * math.cos(x * y))
    assert fxx == pytest.approx(2 * y - y * y * math.sin(x * y))
    assert fxy == pytest.approx(2 * x + math.cos(x * y) - x * y * math.sin(x * y))
    assert fyy == pytest.approx(-x * x * math.sin(x * y))


def test_second_partials_batch():
    x = np.array([0.5, 1.0, 2.0])
    out = dual.second_partials(lambda a, b: a * a * b, x, 3.0)
    np.testing.assert_allclose(out[3], 6.0)
    np.testing.assert_allclose(out[4], 2 * x)


def test_where_picks_branches_with_derivatives():
    x = Dual(np.array([-1.0, 2.0]), np.array([1.0, 1.0]))
    y = dual.where(dual.real(x) > 0, x * x, -x)
    np.testing.assert_array_equal(y.real, [1.0, 4.0])
    np.testing.assert_array_equal(y.dual, [-1.0, 4.0])


def test_sqrt_keeps_extended_precision():
    r = dual.sqrt(np.longdouble(2))
    assert r.dtype == np.longdouble


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-5, 5)))
def test_jacobi_svd_matches_reconstruction(A):
    U, s, Vt = jacobi_svd(A)
    np.testing.assert_allclose(U @ np.diag(s) @ Vt, A, atol=1e-12 * max(1.0, np.abs(A).max()) * 10)
    np.testing.assert_allclose(s, np.linalg.svd(A, compute_uv=False), atol=1e-12 * max(1.0, s[0]) * 10)
    assert np.all(np.diff(s) <= 0)


def test_rank_of_constructed_matrix(rng):
    Q1, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    Q2, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    A = Q1 @ np.diag([3.0, 2.0, 1.0, 0.5, 1e-12, 0.0]) @ Q2
    _, s, _ = jacobi_svd(A)
    assert rank_from_singular_values(s, 1e-7) == 4
    assert rank_from_singular_values(s, 1e-14) == 5
    assert rank_from_singular_values(np.zeros(3), 1e-7) == 0
