import numpy as np
import pytest

from spintop import model as md
from spintop.errors import ConfigError, DegenerateError, DomainError

CONST = md.GenericModel([(0, 0, 1.0)])
QUAD = md.quadratic_model()


def test_structureless_particle():
    for x, y in ((0.3, -1.0), (1.0, 0.5), (2.0, 2.0)):
        assert md.casimir_mass(CONST, x, y) == 1.0
        assert md.casimir_spin(CONST, x, y) == 0.0
        assert md.e_c(CONST, x, y) == 0.0
        assert md.jacobian_cmcj(CONST, x, y) == 0.0


def test_rotator_casimirs_are_one():
    rot = md.RotatorModel()
    x = np.linspace(0.05, 3.0, 25)
    y = np.linspace(-2.0, 2.0, 25)
    np.testing.assert_allclose(md.casimir_mass(rot, x, y), 1.0, atol=1e-14)
    np.testing.assert_allclose(md.casimir_spin(rot, x, y), 1.0, atol=1e-14)
    assert md.e_c(rot, 1.0, 2.0) != 0.0


def test_developable_closed_form_point():
    dev = md.DevelopableModel(np.pi / 3)
    assert md.casimir_mass(dev, 0.5, 1.2) == pytest.approx(1.0, abs=1e-12)
    assert md.casimir_spin(dev, 0.5, 1.2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0, np.pi / 2, 2.5])
def test_developable_is_degenerate(kappa):
    dev = md.DevelopableModel(kappa)
    pts = md.sample_points(dev, 200, 3)
    for x, y in pts[:40]:
        j = dev.jet(x, y)
        assert j.uxy == 0.0 and j.uyy == 0.0
        assert abs(md.closed_form_hessian_factor(dev, x, y)) < 1e-10
        assert abs(md.jacobian_cmcj(dev, x, y)) < 1e-9


def test_developable_domain():
    dev = md.DevelopableModel(np.pi / 2)
    assert dev.x_max() == pytest.approx(2.0)
    assert not dev.in_domain(2.5, 0.0)
    with pytest.raises(DomainError):
        dev.value(2.5, 0.0)
    with pytest.raises(ConfigError):
        md.DevelopableModel(1.0, sign=0)


def test_quadratic_model_is_regular():
    assert md.jacobian_cmcj(QUAD, 1.0, 0.5) != pytest.approx(0.0, abs=1e-3)
    assert md.closed_form_hessian_factor(QUAD, 1.0, 0.5) != pytest.approx(0.0, abs=1e-3)


def test_jacobian_against_finite_differences():
    def cm_cj(x, y):
        return np.array([md.casimir_mass(QUAD, x, y), md.casimir_spin(QUAD, x, y)])

    x, y, h = 0.8, -0.3, 1e-5
    J = np.column_stack(((cm_cj(x + h, y) - cm_cj(x - h, y)) / (2 * h), (cm_cj(x, y + h) - cm_cj(x, y - h)) / (2 * h)))
    assert md.jacobian_cmcj(QUAD, x, y) == pytest.approx(np.linalg.det(J), rel=1e-7)


def test_generic_affine_is_not_fundamental():
    r_m, r_j = md.fundamental_residuals(md.GenericModel([(0, 0, 1.0), (1, 0, 1.0)]), 100, 0)
    assert r_j > 1.0


def test_legendre_closed_form_example():
    om, _, _ = md.legendre_omega(0.0, 0.5, 1, 1)
    assert om == pytest.approx(1.0)


def test_legendre_residuals_in_sampling_box():
    pts = md.sample_points(md.LegendreModel(), 1000, 5)
    for eps in (1, -1):
        for sign in (1, -1):
            r1, r2 = md.legendre_residuals(pts[:, 0], pts[:, 1], eps, sign)
            assert np.abs(r1).max() < 1e-12
            assert np.abs(r2).max() < 1e-12


def test_legendre_residuals_wide_box_and_slice_identity(rng):
    xi = rng.uniform(-3, 3, 1000)
    eta = rng.uniform(0.05, 0.5, 1000) * rng.choice([-1, 1], 1000)
    om, om_xi, _ = md.legendre_omega(xi, eta)
    # omega grows like 1/eta^2, so the residual is judged against omega^2
    for r in md.legendre_residuals(xi, eta):
        assert np.max(np.abs(r) / np.maximum(1.0, om**2)) < 1e-12
    # the combination depends on eta alone: its square is (1 - 4 eta^2) / 4
    np.testing.assert_allclose((xi * om - (xi**2 + eta**2) * om_xi) ** 2, (1 - 4 * eta**2) / 4, atol=1e-10)


def test_legendre_rationalised_branch_matches_direct():
    xi = np.array([-2.0, -0.4, 0.3, 1.7])
    eta = np.array([0.3, -0.45, 0.2, -0.1])
    direct, _, _ = md.legendre_omega(xi, eta)
    np.testing.assert_allclose(md.legendre_omega_fn(xi, eta), direct, rtol=1e-13)


def test_legendre_domain_errors():
    with pytest.raises(DomainError):
        md.legendre_omega(0.3, 0.0)
    with pytest.raises(DomainError):
        md.legendre_omega(0.3, 0.6)


def test_legendre_model_round_trip():
    leg = md.LegendreModel()
    xi = np.array([-0.7, -1.5, -2.0, -0.9])
    eta = np.array([0.3, -0.35, 0.45, -0.27])
    _, x, y = md.legendre_omega(xi, eta, leg.epsilon, leg.sign)
    for i in range(4):
        j = leg.jet(x[i], y[i])
        assert md.casimir_mass(leg, x[i], y[i]) == pytest.approx(1.0, abs=1e-10)
        assert md.casimir_spin(leg, x[i], y[i]) == pytest.approx(1.0, abs=1e-10)
        assert abs(md.e_c(leg, x[i], y[i])) < 1e-10
        assert abs(md.closed_form_hessian_factor(leg, x[i], y[i])) < 1e-9
        assert abs(md.jacobian_cmcj(leg, x[i], y[i])) < 1e-9
        # gradient of u equals the preimage under the transform
        np.testing.assert_allclose([j.ux, j.uy], np.ravel(md.LegendreModel().invert(x[i], y[i])[:2]), atol=1e-12)


def test_legendre_jet_second_partials_by_differences():
    leg = md.LegendreModel()
    x, y, h = 0.6, 0.2, 1e-5
    j = leg.jet(x, y)
    assert j.uxx == pytest.approx((leg.jet(x + h, y).ux - leg.jet(x - h, y).ux) / (2 * h), rel=1e-6)
    assert j.uyy == pytest.approx((leg.jet(x, y + h).uy - leg.jet(x, y - h).uy) / (2 * h), rel=1e-6)
    assert j.uxy == pytest.approx((leg.jet(x, y + h).ux - leg.jet(x, y - h).ux) / (2 * h), rel=1e-6)


def test_legendre_outside_image():
    leg = md.LegendreModel()
    with pytest.raises(DomainError):
        leg.jet(-0.2, 0.0)
    assert not leg.in_domain(-1.0, 0.0)


@pytest.mark.parametrize(
    "model",
    [md.RotatorModel(), md.DevelopableModel(1.0), md.DevelopableModel(0.0), md.DevelopableModel(np.pi / 2), md.LegendreModel()],
    ids=["rotator", "dev-1", "dev-0", "dev-pi/2", "legendre"],
)
def test_fundamental_residuals(model):
    r_m, r_j = md.fundamental_residuals(model, 500, 1)
    assert r_m < 1e-12 and r_j < 1e-12


def test_model_from_dict():
    assert isinstance(md.model_from_dict({"family": "rotator"}), md.RotatorModel)
    dev = md.model_from_dict({"family": "developable", "params": {"kappa": 0.4}})
    assert dev.kappa == 0.4
    assert md.model_from_dict(dev.to_dict()).to_dict() == dev.to_dict()
    with pytest.raises(ConfigError):
        md.model_from_dict({"family": "nope"})
    with pytest.raises(ConfigError):
        md.model_from_dict({"family": "rotator", "params": {"kappa": 1}})


def test_sample_points_are_seeded():
    a = md.sample_points(QUAD, 50, 7)
    np.testing.assert_array_equal(a, md.sample_points(QUAD, 50, 7))
    assert not np.array_equal(a, md.sample_points(QUAD, 50, 8))


def test_hessian_factor_needs_positive_x():
    with pytest.raises(DegenerateError):
        md.closed_form_hessian_factor(QUAD, 1e-14, 0.0)
