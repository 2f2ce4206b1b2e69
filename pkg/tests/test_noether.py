import numpy as np
import pytest

from spintop import hessian as hs
from spintop import kinematics as kin
from spintop import minkowski as mk
from spintop import model as md
from spintop import noether as nt
from spintop import spinor as sp
from spintop.errors import ConfigError, DegenerateError

FAMILIES = {
    "generic": md.quadratic_model(),
    "developable": md.DevelopableModel(0.5),
    "rotator": md.RotatorModel(),
}


def _state(seed=2, model=None):
    return hs.random_states(1, seed, model)[0]


def _random_pairs(rng, n):
    return [(rng.normal(size=4), rng.normal(size=4)) for _ in range(n)]


def test_free_particle_momenta():
    s = _state()
    cs = nt.canonical_momenta_euler(md.GenericModel([(0, 0, 1.0)]), 1.7, 1.0, s)
    xdot = np.concatenate(([1.0], s.velocity))
    np.testing.assert_allclose(cs.p, 1.7 * xdot / np.sqrt(mk.dot(xdot, xdot)), rtol=1e-14)
    for _, pi in cs.pairs:
        np.testing.assert_array_equal(pi, 0.0)


@pytest.mark.parametrize("name", list(FAMILIES))
def test_casimirs_match_closed_forms(name):
    model, m, ell = FAMILIES[name], 1.3, 0.7
    for s in hs.random_states(10, 5, model, ell=ell):
        x, y = hs.state_xy(s, ell)
        cm, cj = nt.casimir_values(nt.canonical_momenta_euler(model, m, ell, s), m, ell)
        assert cm == pytest.approx(md.casimir_mass(model, x, y), rel=1e-8)
        assert cj == pytest.approx(md.casimir_spin(model, x, y), rel=1e-8)


def test_momenta_are_reparametrisation_invariant():
    xdot, triad, rates = kin.covariant_chart(_state())
    model = FAMILIES["generic"]
    a = nt.canonical_momenta(model, 1.0, 1.0, (xdot, triad, rates))
    b = nt.canonical_momenta(model, 1.0, 1.0, (2.5 * xdot, triad, tuple(2.5 * r for r in rates)))
    np.testing.assert_allclose(b.p, a.p, rtol=1e-13)
    for (_, pa), (_, pb) in zip(a.pairs, b.pairs):
        np.testing.assert_allclose(pb, pa, atol=1e-13)


def test_triad_gauge_leaves_p_and_spin_invariant():
    model, m, ell = FAMILIES["developable"], 1.0, 1.0
    xdot, triad, rates = kin.covariant_chart(_state(seed=9))
    base = nt.canonical_momenta(model, m, ell, (xdot, triad, rates))
    lam, mu, nu = 1.8, 0.4, -0.7
    moved = sp.gauge_transform(triad, lam, mu, nu)
    new_rates = kin.gauge_transform_rates(triad, rates, lam, mu, nu, 0.2, 0.1, -0.3)
    other = nt.canonical_momenta(model, m, ell, (xdot, moved, new_rates))
    np.testing.assert_allclose(other.p, base.p, rtol=1e-12)
    assert nt.casimir_spin_detsum(other) == pytest.approx(nt.casimir_spin_detsum(base), rel=1e-10)


def test_spin_without_internal_momenta_vanishes():
    cs = nt.CanonicalSet([2.0, 0.3, 0.0, 0.1], [(np.array([0, 1.0, 0, 0]), np.zeros(4))])
    np.testing.assert_array_equal(nt.spin_tensor(cs).J.components, 0.0)
    assert nt.casimir_spin_detsum(cs) == 0.0


def test_spin_tensor_properties(rng):
    for n in (1, 2, 3):
        p = np.concatenate(([3.0], rng.normal(size=3)))
        cs = nt.CanonicalSet(p, _random_pairs(rng, n), x=rng.normal(size=4))
        data = nt.spin_tensor(cs)
        np.testing.assert_allclose(data.J.matrix() @ mk.lower(p), 0.0, atol=1e-10)
        np.testing.assert_allclose(nt.spin_tensor_summed(cs).components, data.J.components, atol=1e-10)
        WW = mk.dot(data.W, data.W)
        assert WW == pytest.approx(-0.5 * mk.dot(p, p) * nt.spin_square(data.J), rel=1e-9)
        assert nt.casimir_spin_detsum(cs) == pytest.approx(WW, rel=1e-9)
        # the orbital term changes M but not W
        np.testing.assert_allclose(nt.pauli_lubanski(nt.angular_momentum(cs, include_orbital=False), p), data.W, atol=1e-10)


def test_pauli_lubanski_examples():
    np.testing.assert_array_equal(nt.pauli_lubanski(mk.Bivector(np.zeros(6)), [1.0, 0.2, 0, 0]), 0.0)
    M = mk.Bivector([0, 0, 0, 0.3, -0.5, 1.1])  # purely spatial
    W = nt.pauli_lubanski(M, [2.0, 0, 0, 0])
    assert W[0] == 0.0
    np.testing.assert_allclose(np.abs(W[1:]), 2.0 * np.abs([0.3, -0.5, 1.1]))


def test_detsum_vanishes_for_parallel_pair():
    q = np.array([0.2, 1.0, -0.5, 0.3])
    cs = nt.CanonicalSet([1.5, 0.1, 0.2, 0.0], [(q, -2.0 * q)])
    assert nt.casimir_spin_detsum(cs) == pytest.approx(0.0, abs=1e-14)


def test_projection_requires_massive_momentum():
    with pytest.raises(DegenerateError):
        nt.project_spin(mk.Bivector(np.ones(6)), [1.0, 0, 0, 1.0])


def test_dof_examples():
    assert nt.dof_count(1, 2, 0) == (5, 4, 1)
    assert nt.dof_count(1, 2, 0, casimir_constraints=1)[2] == 0
    for n_v in range(1, 6):
        for n_i in range(2, 7):
            for n_ii in (0, 2, 4):
                assert nt.dof_count(n_v, n_i, n_ii)[2] == 1


@pytest.mark.parametrize("args", [(1, 2, 1), (-1, 2, 0), (1, 2.5, 0)])
def test_dof_rejects_bad_counts(args):
    with pytest.raises(ConfigError):
        nt.dof_count(*args)
