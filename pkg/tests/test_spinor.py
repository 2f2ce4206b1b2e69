import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spintop import minkowski as mk
from spintop import spinor as sp
from spintop.errors import DomainError

component = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
spinors = st.tuples(component, component).filter(lambda u: abs(u[0]) + abs(u[1]) > 1e-2).map(np.array)


def test_flagpole_examples():
    np.testing.assert_allclose(sp.k_from_spinor([1, 0]), [1, 0, 0, 1])
    np.testing.assert_allclose(sp.k_from_spinor([0, 1]), [1, 0, 0, -1])
    np.testing.assert_array_equal(sp.k_from_spinor([1, 0]), sp.k_from_spinor([-1, 0]))


def test_flag_of_up_spinor():
    t = sp.flag_from_spinor([1, 0])
    np.testing.assert_allclose(t.k, [1, 0, 0, 1])
    assert t.a[0] == 0 and t.b[0] == 0
    assert t.max_residual() < 1e-15


def test_zero_spinor_has_no_flag():
    with pytest.raises(DomainError):
        sp.flag_from_spinor([0, 0])


@settings(max_examples=300)
@given(spinors)
def test_flag_is_a_valid_triad(u):
    t = sp.flag_from_spinor(u)
    scale = float(np.vdot(u, u).real) ** 2
    r = t.residuals()
    assert abs(r["kk"]) <= 1e-12 * scale
    for key in ("ak", "bk", "ab", "aa+1", "bb+1"):
        assert abs(r[key]) <= 1e-10 * max(1.0, scale), key


@settings(max_examples=200)
@given(spinors)
def test_sign_flip_gives_identical_triad(u):
    t, s = sp.flag_from_spinor(u), sp.flag_from_spinor(-u)
    np.testing.assert_array_equal(t.k, s.k)
    np.testing.assert_array_equal(t.a, s.a)
    np.testing.assert_array_equal(t.b, s.b)


@settings(max_examples=200)
@given(spinors, st.floats(-10, 10))
def test_spinor_phase_rotates_flag_twice(u, chi):
    rotated = sp.flag_from_spinor(np.exp(1j * chi) * u)
    expected = sp.phase_rotate(sp.flag_from_spinor(u), 2 * chi)
    np.testing.assert_allclose(rotated.k, expected.k, rtol=1e-12, atol=1e-12 * np.abs(expected.k).max())
    np.testing.assert_allclose(rotated.a, expected.a, atol=1e-10)
    np.testing.assert_allclose(rotated.b, expected.b, atol=1e-10)


def test_flag_bivector_has_both_forms(rng):
    for _ in range(50):
        t = sp.flag_from_spinor(rng.normal(size=2) + 1j * rng.normal(size=2))
        star = np.einsum("mnab,a,b->mn", mk.EPS_UPPER, mk.lower(t.k), mk.lower(t.b))
        np.testing.assert_allclose(t.bivector().matrix(), star, atol=1e-12 * np.abs(t.k).max())


def test_cartan_whittaker_relations_hold(rng):
    for _ in range(100):
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        lhs, rhs = sp.cartan_whittaker_relations(u)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12 * np.abs(rhs).max())


def test_cartan_whittaker_minus_sign_fails_off_axis():
    lhs, rhs = sp.cartan_whittaker_relations([0.8 + 0.1j, 0.5 - 0.3j], second_sign=-1)
    assert abs(lhs[1] - rhs[1]) > 0.1
    lhs, rhs = sp.cartan_whittaker_relations([0.8 + 0.1j, 0.0], second_sign=-1)
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


def test_null_bivector_check():
    np.testing.assert_allclose(sp.null_bivector_check(sp.flag_from_spinor([1 + 1j, 2]).bivector()), (0, 0), atol=1e-10)
    first, second = sp.null_bivector_check(mk.Bivector.wedge([1, 0, 0, 0], [0, 1, 0, 0]))
    assert first == pytest.approx(-2.0) and second == 0.0
    assert sp.null_bivector_check(mk.Bivector(np.zeros(6))) == (0.0, 0.0)


def test_gauge_transform():
    t = sp.flag_from_spinor([0.4 - 0.2j, 1.3j])
    same = sp.gauge_transform(t, 1.0, 0.0, 0.0)
    np.testing.assert_array_equal(same.a, t.a)
    moved = sp.gauge_transform(t, 2.5, -0.7, 1.9)
    assert moved.max_residual() < 1e-12 * 2.5**2 * 10
    twice = sp.gauge_transform(sp.gauge_transform(t, 2.0, 0.3, -0.1), 0.5, 0.2, 0.4)
    direct = sp.gauge_transform(t, 1.0, 0.3 + 0.2 * 2.0, -0.1 + 0.4 * 2.0)
    for name in "kab":
        np.testing.assert_allclose(getattr(twice, name), getattr(direct, name), atol=1e-14)
    with pytest.raises(DomainError):
        sp.gauge_transform(t, 0.0, 0.0, 0.0)


def test_phase_rotate():
    t = sp.flag_from_spinor([0.3 + 0.9j, -0.4])
    np.testing.assert_array_equal(sp.phase_rotate(t, 0.0).a, t.a)
    full = sp.phase_rotate(t, 2 * np.pi)
    np.testing.assert_allclose(full.a, t.a, atol=1e-12)
    np.testing.assert_allclose(full.b, t.b, atol=1e-12)
    quarter = sp.phase_rotate(t, np.pi / 2)
    np.testing.assert_allclose(quarter.a, t.b, atol=1e-15)
    np.testing.assert_allclose(quarter.b, -t.a, atol=1e-15)


def test_riemann_sphere_pole_and_pencils():
    t = sp.flag_from_spinor([1, 0])
    data = sp.riemann_sphere_data(t, [-1.0, 0.0, 1.0], n_points=16)
    np.testing.assert_allclose(data.k_image, [0, 0, 1])
    for tag, base in (("a", t.a), ("b", t.b)):
        for lam in (-1.0, 0.0, 1.0):
            s = base + lam * t.k
            pts = data.family(tag, lam)
            assert pts.shape == (16, 3)
            np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)
            # every point is a null direction orthogonal to s, and so is k
            np.testing.assert_allclose(pts @ s[1:], s[0], atol=1e-14)
            assert data.k_image @ s[1:] == pytest.approx(s[0], abs=1e-14)


def test_rotated_triad_keeps_pole_and_rotates_pencils():
    t = sp.flag_from_spinor([0.6 + 0.2j, 0.3])
    r = sp.phase_rotate(t, 0.7)
    d0 = sp.riemann_sphere_data(t, [0.0], 12)
    d1 = sp.riemann_sphere_data(r, [0.0], 12)
    np.testing.assert_allclose(d0.k_image, d1.k_image, atol=1e-15)
    direction = np.cos(0.7) * t.a + np.sin(0.7) * t.b
    np.testing.assert_allclose(d1.family("a") @ direction[1:], direction[0], atol=1e-14)
    assert np.abs(d0.family("a") - d1.family("a")).max() > 0.1


def test_sphere_csv_has_header_and_pole():
    text = sp.riemann_sphere_data(sp.flag_from_spinor([1, 0]), [0.0], 4).to_csv()
    lines = text.splitlines()
    assert lines[0] == "family,lambda,x,y,z"
    assert lines[1].startswith("k,,")
    assert len(lines) == 2 + 2 * 4
