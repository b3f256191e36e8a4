import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srgb import fixtures
from srgb.errors import ExtrapolationError, ParameterError, QuadratureError
from srgb.quadrature import (
    ExtrapolationModel,
    MeasureKind,
    SurfaceChart,
    adaptive_simpson,
    chart_density,
    curve_density,
    integrate_many,
    limit_extrapolate,
    line_integral,
    principal_value_integral,
    sigma_bar_extrapolated,
    surface_integral,
)

LINE = fixtures.curve("affine-line").curve


def plane_chart(rect=(1.0, 2.0, 0.0, 1.0)):
    return SurfaceChart(
        fixtures.surface("affine-x3"),
        lambda s, t: np.stack(np.broadcast_arrays(s, t, np.zeros_like(s)), -1),
        lambda s, t: (np.stack(np.broadcast_arrays(1.0, 0.0, 0.0 * s), -1),
                      np.stack(np.broadcast_arrays(0.0, 1.0, 0.0 * s), -1)),
        rect,
        name="plane",
    )


def test_adaptive_simpson():
    v, err = adaptive_simpson(np.sin, 0.0, math.pi, 1e-12)
    assert v == pytest.approx(2, abs=1e-11)
    assert adaptive_simpson(np.zeros_like, 0.0, 1.0, 1e-12)[0] == 0


def test_integrate_many_independent_panels():
    vals, _ = integrate_many(lambda i, x: x ** (i + 1), np.zeros(3), np.ones(3), 1e-12)
    np.testing.assert_allclose(vals, [1 / 2, 1 / 3, 1 / 4], atol=1e-11)


def test_non_finite_raises():
    with pytest.raises(QuadratureError), np.errstate(divide="ignore", invalid="ignore"):
        adaptive_simpson(lambda x: 1 / x, 0.0, 1.0, 1e-9)


def test_curve_densities():
    t = np.array([0.3])
    assert curve_density("affine", LINE, t, None, MeasureKind.DS)[0] == pytest.approx(1)
    assert curve_density("affine", LINE, t, 4.0, MeasureKind.DS_L)[0] == pytest.approx(2)
    with pytest.raises(ParameterError):
        curve_density("affine", LINE, t, None, MeasureKind.DS_L)


def test_line_integrals():
    assert line_integral(LINE, None, MeasureKind.DS, None, 1e-12, space="affine") == pytest.approx(1)
    assert line_integral(LINE, lambda t: 0 * t, MeasureKind.DS, None, 1e-12, space="affine") == 0
    big = line_integral(LINE, None, MeasureKind.DS_L, 1e6, 1e-9, space="affine") / 1e3
    assert big == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("name", ["affine-generic", "e11-generic", "e11-line"])
def test_ds_bar_is_fitted_coefficient(name):
    fx = fixtures.curve(name)
    t = np.array([fx.t])
    grid = [1e2, 1e3, 1e4, 1e5, 1e6]
    samples = [(L, curve_density(fx.space, fx.curve, t, L, MeasureKind.DS_L) / math.sqrt(L)) for L in grid]
    fit = limit_extrapolate(samples, ExtrapolationModel.A_PLUS_B_OVER_L, extra_terms=2)
    assert fit["coefficients"][0][0] == pytest.approx(curve_density(fx.space, fx.curve, t, None, MeasureKind.DS)[0])
    assert fit["coefficients"][1][0] == pytest.approx(
        curve_density(fx.space, fx.curve, t, None, MeasureKind.DS_BAR)[0], abs=1e-6)


def test_surface_area_plane():
    chart = plane_chart()
    assert surface_integral(chart, None, MeasureKind.DSIGMA, None, tol=1e-10).value == pytest.approx(0.5, abs=1e-9)
    assert surface_integral(chart, lambda p: 0 * p[..., 0], MeasureKind.DSIGMA, None).value == 0
    big = surface_integral(chart, None, MeasureKind.DSIGMA_L, 1e6, tol=1e-8).value / 1e3
    assert big == pytest.approx(0.5, abs=1e-3)


def test_dsigma_density_and_orientation():
    chart = plane_chart()
    s, t = np.array([1.5]), np.array([0.2])
    assert chart_density(chart, s, t, None, MeasureKind.DSIGMA)[0] == pytest.approx(1 / 1.5**2)
    assert chart_density(chart.reversed(), s, t, None, MeasureKind.DSIGMA)[0] < 0


@pytest.mark.parametrize("name", ["affine-bump-disk", "e11-bump-disk"])
def test_sigma_bar_closed_form_matches_fit(name):
    chart = fixtures.scenario(name).chart
    s0, s1, t0, t1 = chart.rect
    S, T = np.meshgrid(np.linspace(s0, s1, 4)[1:], np.linspace(t0, t1, 4))
    np.testing.assert_allclose(chart_density(chart, S, T, None, MeasureKind.DSIGMA_BAR),
                               sigma_bar_extrapolated(chart, S, T), atol=1e-6)


def test_characteristic_exclusion_reported():
    chart = fixtures.chart("e11-x1x2-square")
    res = surface_integral(chart, None, MeasureKind.DSIGMA_L, 4.0, tol=1e-6, max_excluded_fraction=0.5)
    assert res.excluded_area > 0
    assert 0 < res.excluded_fraction < 0.5
    with pytest.raises(QuadratureError):
        surface_integral(chart, None, MeasureKind.DSIGMA_L, 4.0, tol=1e-6, max_excluded_fraction=1e-6)


def test_principal_value_odd_pole():
    curve = fixtures.curve("affine-horizontal").curve  # omega = -2t, root at t = 0
    res = principal_value_integral("affine", curve, lambda t: 1 / t + 1.0, tol=1e-10)
    assert res["roots"] == pytest.approx([0.0], abs=1e-12)
    assert res["value"] == pytest.approx(1.0, abs=1e-8)


def test_limit_extrapolate_models():
    samples = [(L, 3 + 2 / L) for L in (1e2, 1e3, 1e4)]
    fit = limit_extrapolate(samples, ExtrapolationModel.A_PLUS_B_OVER_L)
    assert fit["coefficients"] == pytest.approx([3, 2])
    assert fit["residual"] < 1e-12
    samples = [(L, 5 * L - 1 + 0.5 / math.sqrt(L)) for L in (1e2, 1e3, 1e4, 1e5)]
    fit = limit_extrapolate(samples, ExtrapolationModel.A_L_PLUS_B, extra_terms=1)
    assert fit["coefficients"][:2] == pytest.approx([5, -1])
    with pytest.raises(ExtrapolationError):
        limit_extrapolate(samples[:2], ExtrapolationModel.A_PLUS_B_OVER_SQRTL)


@settings(max_examples=20, deadline=None)
@given(A=st.floats(-10, 10), B=st.floats(-10, 10))
def test_extrapolation_recovers_exact_model(A, B):
    samples = [(L, A + B / math.sqrt(L)) for L in (1e2, 1e4, 1e6)]
    fit = limit_extrapolate(samples, ExtrapolationModel.A_PLUS_B_OVER_SQRTL)
    assert fit["coefficients"][0] == pytest.approx(A, abs=1e-9)
    assert fit["coefficients"][1] == pytest.approx(B, abs=1e-7)
