import numpy as np
import pytest

from srgb import fixtures
from srgb.errors import ConfigError
from srgb.gauss_bonnet import validate_scenario


@pytest.mark.parametrize("name", sorted(fixtures.SCENARIOS))
def test_scenarios_validate(name):
    validate_scenario(fixtures.scenario(name))


@pytest.mark.parametrize("name", sorted(fixtures.SURFACE_CURVES))
def test_surface_curves_lie_on_surface(name):
    surf, fx = fixtures.surface_curve(name)
    a, b = fx.curve.domain
    g, _, _ = fx.curve.eval(np.linspace(a, b, 33))
    assert np.max(np.abs(surf.u(g))) < 1e-12


@pytest.mark.parametrize("name", sorted(fixtures.SURFACES))
def test_surface_gradients_match_finite_differences(name):
    surf = fixtures.surface(name)
    p = np.array([1.2, 0.3, -0.4])
    h = 1e-6
    fd = [(surf.u(p + h * e) - surf.u(p - h * e)) / (2 * h) for e in np.eye(3)]
    np.testing.assert_allclose(surf.grad(p), fd, atol=1e-8)


def test_unknown_names():
    for getter in (fixtures.scenario, fixtures.curve, fixtures.surface, fixtures.surface_curve, fixtures.chart):
        with pytest.raises(ConfigError):
            getter("no-such-fixture")


def test_registry_contains_cli_names():
    for name in ("affine-x3-disk", "affine-x2-surface", "e11-x3-disk", "e11-x1x2-surface"):
        assert name in fixtures.SCENARIOS
    for name in ("affine-line", "affine-x1-flow"):
        assert name in fixtures.CURVES


def test_e11_x1x2_boundary_crosses_characteristic_circle():
    sc = fixtures.scenario("e11-x1x2-surface")
    g, _, _ = sc.boundary[0].eval(np.linspace(*sc.boundary[0].domain, 400))
    assert np.any(np.diff(np.sign(g[:, 2])) != 0)
