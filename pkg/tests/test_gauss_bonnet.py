import dataclasses
import math

import pytest

from srgb import fixtures
from srgb.errors import CharacteristicPointError, ConfigError
from srgb.gauss_bonnet import (
    finite_L_check,
    gb_sweep,
    limit_check_first_kind,
    limit_check_second_kind,
    validate_scenario,
    worker_count,
)


@pytest.mark.parametrize(
    "name", ["affine-x3-disk", "affine-x2-surface", "affine-x1-plane", "affine-bump-disk", "e11-x3-disk",
             "e11-bump-disk"],
)
def test_classical_gauss_bonnet(name):
    sc = fixtures.scenario(name)
    for L in (1.0, 4.0):
        rep = finite_L_check(sc, L)
        assert rep.passed, (name, L, rep.residual)
        assert abs(rep.residual) < 1e-6


def test_wrong_euler_characteristic_shifts_target():
    rep = finite_L_check(fixtures.scenario("affine-x3-disk").with_params(euler_char=2), 4.0)
    assert rep.residual == pytest.approx(-2 * math.pi, abs=1e-6)
    assert rep.passed is False


def test_deformed_finite_check_is_not_gated():
    rep = finite_L_check(fixtures.scenario("affine-x3-disk").with_params(param=0.5), 4.0)
    assert rep.passed is None and rep.gate is None
    assert math.isfinite(rep.residual)


@pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
def test_first_kind_limit_affine_disk(a):
    rep = limit_check_first_kind(fixtures.scenario("affine-x3-disk").with_params(param=a))
    assert rep.passed
    assert abs(rep.details["area_delta"]) < 1e-8


@pytest.mark.parametrize("name", ["affine-bump-disk", "e11-bump-disk"])
def test_first_kind_limit_holds_with_fitted_coefficients(name):
    rep = limit_check_first_kind(fixtures.scenario(name).with_params(param=0.5))
    assert abs(rep.details["residual_fitted"]) < 1e-6


def test_first_kind_needs_first_distribution():
    with pytest.raises(ConfigError):
        limit_check_first_kind(fixtures.scenario("affine-x3-disk").with_params(dist="h2"))
    with pytest.raises(ConfigError):
        limit_check_second_kind(fixtures.scenario("affine-x3-disk"))


def test_second_kind_on_horizontal_normal_fixture():
    rep = limit_check_second_kind(fixtures.scenario("affine-x3-disk").with_params(dist="h2", param=0.5))
    d = rep.details
    assert abs(d["lead_residual"]) < 1e-9
    assert d["lead_candidate_passed"]
    # the sqrt(L) coefficient of the finite-L sum vanishes with ds on the boundary
    assert abs(d["residual_order_sqrtL"]) < 1e-6
    assert abs(d["residual_ds_variant"]) < 1e-6


def test_validate_rejects_empty_boundary():
    sc = dataclasses.replace(fixtures.scenario("affine-x3-disk"), boundary=())
    with pytest.raises(ConfigError):
        validate_scenario(sc)


def test_characteristic_crossing_boundary():
    with pytest.raises(CharacteristicPointError):
        finite_L_check(fixtures.scenario("e11-x1x2-surface"), 4.0)


def test_sweep_slope_and_limit():
    out = gb_sweep(fixtures.scenario("affine-x3-disk"), (1e2, 1e4, 1e6))
    assert out["slope"] == pytest.approx(-0.5, abs=0.05)
    assert abs(out["extrapolated_limit"]) < 1e-6


def test_worker_count(monkeypatch):
    monkeypatch.setenv("SRGB_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("SRGB_THREADS", "0")
    assert worker_count() == 1
    monkeypatch.setenv("SRGB_THREADS", "junk")
    with pytest.raises(ConfigError):
        worker_count()
