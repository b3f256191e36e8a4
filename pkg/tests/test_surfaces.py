import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srgb import fixtures
from srgb.connections import ConnectionContext
from srgb.errors import CharacteristicPointError, NonTangentError, OffSurfaceError
from srgb.model_spaces import coordinate_to_frame, metric_inner
from srgb.surfaces import (
    E11AlphaReading,
    adapted_frame,
    brioschi_curvature,
    characteristic_report,
    expansion_fit,
    gauss_sectional,
    leading_candidates,
    printed_constant_term,
    printed_mean_curvature_limit,
    printed_second_fundamental,
    second_fundamental,
    surface_curvature_limits,
    surface_curvatures,
    tangent_ops,
)

P_AFF = np.array([[1.3, 0.4, 0.0]])
BUMP = 0.3


def bump_phi(s, t):
    return np.array([s, t, BUMP * np.sin(s) * np.cos(t)])


def test_frame_on_affine_x3():
    L = 9.0
    fr = adapted_frame(fixtures.surface("affine-x3"), P_AFF, L)
    assert (fr.p[0], fr.q[0], fr.r[0]) == pytest.approx((0, 1, 0))
    np.testing.assert_allclose(fr.nu[0], (0, 1, 0), atol=1e-15)
    np.testing.assert_allclose(fr.e1[0], (1, 0, 0), atol=1e-15)
    np.testing.assert_allclose(fr.e2[0], (0, 0, -1 / 3), atol=1e-15)


def test_frame_quantities_affine_x2():
    fr = adapted_frame(fixtures.surface("affine-x2"), np.array([[2.0, 0.0, 0.5]]), 4.0)
    assert (fr.p[0], fr.q[0], fr.s[0]) == pytest.approx((0, 2, 2))
    assert (fr.r[0], fr.l[0], fr.l_L[0]) == pytest.approx((1, 2, math.sqrt(5)))


def test_characteristic_point():
    surf = fixtures.surface("e11-x1x2")
    p = np.array([[0.2, -0.2, 0.0]])
    assert characteristic_report(surf, p).is_characteristic.all()
    with pytest.raises(CharacteristicPointError) as info:
        adapted_frame(surf, p, 2.0)
    assert info.value.report is not None
    assert not characteristic_report(surf, np.array([[0.2, -0.2, 0.5]])).is_characteristic.any()


@pytest.mark.parametrize("name, p", [("affine-bump", (1.1, 0.3)), ("e11-bump", (0.4, -0.7))])
def test_frame_orthonormal(name, p):
    surf = fixtures.surface(name)
    pt = np.array([bump_phi(*p)])
    for L in (1.0, 50.0):
        fr = adapted_frame(surf, pt, L)
        basis = [fr.e1[0], fr.e2[0], fr.nu[0]]
        gram = [[metric_inner(L, a, b) for b in basis] for a in basis]
        np.testing.assert_allclose(gram, np.eye(3), atol=1e-12)


def test_tangent_ops():
    fr = adapted_frame(fixtures.surface("affine-bump"), np.array([bump_phi(1.1, 0.3)]), 7.0)
    J = tangent_ops(fr, fr.e1)["J"]
    np.testing.assert_allclose(J, fr.e2, atol=1e-14)
    v = 0.3 * fr.e1 - 1.7 * fr.e2
    np.testing.assert_allclose(tangent_ops(fr, tangent_ops(fr, v)["J"])["J"], -v, atol=1e-13)
    with pytest.raises(NonTangentError):
        tangent_ops(fr, fr.nu)


def test_lambda_on_line():
    L = 16.0
    fr = adapted_frame(fixtures.surface("affine-x3"), np.array([[1.0, 0.5, 0.0]]), L)
    ops = tangent_ops(fr, np.array([[0.0, 0.0, 1.0]]))
    assert (ops["lambda1"][0], ops["lambda2"][0]) == pytest.approx((0, -math.sqrt(L)), abs=1e-12)


def test_surface_curvature_on_line():
    surf, fx = fixtures.surface_curve("affine-x3-line")
    t = np.array([fx.t])
    for L in (1e2, 1e4, 1e6):
        k = surface_curvatures(ConnectionContext.build("affine", "h1", 0.0, L), surf, fx.curve, t)
        assert abs(k["k_L_signed"][0]) == pytest.approx(1, abs=2 / L)


def test_surface_curvature_ellipse_close_to_limit():
    surf, fx = fixtures.surface_curve("affine-x3-ellipse")
    t = np.array([fx.t])
    k = surface_curvatures(ConnectionContext.build("affine", "h1", 0.0, 1e4), surf, fx.curve, t)["k_L_signed"][0]
    lim = surface_curvature_limits("affine", "h1", 0.0, surf, fx.curve, t)
    assert k == pytest.approx(lim["k_inf_signed"][0], abs=2e-2)
    assert lim["k_inf_signed"][0] == pytest.approx(lim["k_inf_signed_constructed"][0], rel=1e-9)


def test_off_surface_error():
    surf = fixtures.surface("affine-x2")
    curve = fixtures.curve("affine-line").curve
    with pytest.raises(OffSurfaceError):
        surface_curvatures(ConnectionContext.build("affine", "h1", 0, 4), surf, curve, np.array([0.5]))


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
def test_limit_magnitude_on_line(a):
    surf, fx = fixtures.surface_curve("affine-x3-line")
    lim = surface_curvature_limits("affine", "h1", a, surf, fx.curve, np.array([fx.t]))
    assert lim["k_inf"][0] == pytest.approx(1 - a)


def test_e11_h2_limit_vanishes_at_beta_one():
    surf, fx = fixtures.surface_curve("e11-x3-circle")
    lim = surface_curvature_limits("e11", "h2", 1.0, surf, fx.curve, np.array([fx.t]))
    assert lim["k_inf"][0] == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("a", [0.0, 0.4, 1.0])
def test_second_fundamental_affine_x3(a):
    L = 25.0
    sf = second_fundamental(ConnectionContext.build("affine", "h1", a, L), fixtures.surface("affine-x3"), P_AFF)
    assert sf["II"][0, 0, 0] == pytest.approx(0, abs=1e-14)
    assert sf["II"][0, 0, 1] == pytest.approx(-(1 - a) * math.sqrt(L) / 2)
    fr = adapted_frame(fixtures.surface("affine-x3"), P_AFF, L)
    assert printed_mean_curvature_limit("affine", "h1", a, fr)[0] == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize(
    "space, dist, name, reading",
    [
        ("affine", "h1", "affine-bump", E11AlphaReading.ONE_MINUS_BETA),
        ("e11", "h1", "e11-bump", E11AlphaReading.ONE_MINUS_BETA),
    ],
)
def test_printed_second_fundamental_matches(space, dist, name, reading):
    surf = fixtures.surface(name)
    pts = np.array([bump_phi(0.9, 0.2), bump_phi(1.4, -0.6)])
    for a in (0.0, 0.35):
        for L in (3.0, 400.0):
            fr = adapted_frame(surf, pts, L)
            II = second_fundamental(ConnectionContext.build(space, dist, a, L), surf, pts)["II"]
            np.testing.assert_allclose(printed_second_fundamental(space, dist, a, fr, reading), II,
                                       atol=1e-9 * math.sqrt(L))


def test_printed_second_fundamental_affine_h2_h21_only():
    surf = fixtures.surface("affine-bump")
    pts = np.array([bump_phi(0.9, 0.2)])
    fr = adapted_frame(surf, pts, 30.0)
    II = second_fundamental(ConnectionContext.build("affine", "h2", 0.5, 30.0), surf, pts)["II"][0]
    pr = printed_second_fundamental("affine", "h2", 0.5, fr)[0]
    diff = np.abs(II - pr) > 1e-9
    assert diff.tolist() == [[False, False], [True, False]]


@pytest.mark.parametrize(
    "space, name, phi, st_",
    [
        ("affine", "affine-x3", lambda s, t: np.array([s, t, 0.0]), (1.3, 0.4)),
        ("affine", "affine-bump", bump_phi, (1.1, 0.3)),
        ("e11", "e11-x3", lambda s, t: np.array([s, t, 0.0]), (0.3, -0.2)),
        ("e11", "e11-bump", bump_phi, (0.4, -0.7)),
    ],
)
@pytest.mark.parametrize("L", [1.0, 4.0])
def test_gauss_equation_matches_brioschi(space, name, phi, st_, L):
    surf = fixtures.surface(name)
    K = gauss_sectional(ConnectionContext.build(space, "h1", 0.0, L), surf, phi(*st_)[None])["K_sigma"][0]
    assert K == pytest.approx(brioschi_curvature(space, L, phi, *st_), abs=1e-4)


def test_sectional_large_L_affine_x3():
    K = gauss_sectional(ConnectionContext.build("affine", "h1", 0.0, 1e6), fixtures.surface("affine-x3"), P_AFF)
    assert K["K_sigma"][0] == pytest.approx(-1, abs=1e-3)


def test_e11_x3_plane_is_flat():
    # the induced metric on x3 = 0 is flat for every L and parameter
    surf = fixtures.surface("e11-x3")
    for b in (0.0, 0.5):
        for L in (1.0, 1e3, 1e6):
            K = gauss_sectional(ConnectionContext.build("e11", "h1", b, L), surf, np.array([[0.3, 0.1, 0.0]]))
            assert K["K_sigma"][0] == pytest.approx(0, abs=1e-9)


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
def test_expansion_fit_affine_x3(a):
    fit = expansion_fit("affine", "h1", a, fixtures.surface("affine-x3"), P_AFF)
    assert fit.c_lead[0] == pytest.approx(0, abs=1e-6)
    assert fit.c_0[0] == pytest.approx(-(1 - a), abs=1e-6)
    fr = adapted_frame(fixtures.surface("affine-x3"), P_AFF, 1.0)
    assert printed_constant_term("affine", "h1", a, fr)[0] == pytest.approx(-(1 - a))


def test_second_kind_leading_fit_vs_candidates():
    surf = fixtures.surface("affine-x1")
    p = np.array([[2.0, 0.3, -0.4]])
    fit = expansion_fit("affine", "h2", 0.5, surf, p)
    cands = leading_candidates("affine", "h2", 0.5, adapted_frame(surf, p, 1.0))
    assert fit.c_lead[0] == pytest.approx(0, abs=1e-9)
    assert cands["expansion"][0] == pytest.approx(0.125)
    assert cands["identity"][0] == pytest.approx(0.25)


@settings(max_examples=20, deadline=None)
@given(s=st.floats(0.5, 2.0), t=st.floats(-1.0, 1.0), L=st.floats(1.0, 1e4), a=st.floats(0, 1))
def test_nu_is_unit_normal(s, t, L, a):
    surf = fixtures.surface("affine-bump")
    x = bump_phi(s, t)
    fr = adapted_frame(surf, x[None], L)
    assert metric_inner(L, fr.nu[0], fr.nu[0]) == pytest.approx(1, rel=1e-12)
    h = 1e-6
    tangent = coordinate_to_frame("affine", x, (bump_phi(s + h, t) - bump_phi(s - h, t)) / (2 * h))
    assert abs(metric_inner(L, tangent, fr.nu[0])) < 1e-6 * math.sqrt(L)
